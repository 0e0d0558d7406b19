#include "tsqa/util.hpp"

#include <cctype>
#include <cstdlib>

namespace tsqa {

namespace {

bool digit(char c) { return c >= '0' && c <= '9'; }

} // namespace

std::vector<double> extract_numbers(std::string_view text) {
    std::vector<double> out;
    std::size_t i = 0, n = text.size();
    while (i < n) {
        char c = text[i];
        std::size_t start = i;
        bool signed_start = (c == '-' || c == '+') && i + 1 < n && digit(text[i + 1]) &&
                            (i == 0 || !is_word_char(text[i - 1]));
        if (!digit(c) && !signed_start) {
            ++i;
            continue;
        }
        // Numerals embedded in identifiers (p99, t100) are not values.
        if (digit(c) && i > 0 && is_word_char(text[i - 1]) && !digit(text[i - 1]) &&
            text[i - 1] != '=') {
            while (i < n && digit(text[i])) ++i;
            continue;
        }
        std::size_t j = i + (signed_start ? 1 : 0);
        while (j < n && digit(text[j])) ++j;
        if (j < n && text[j] == '.' && j + 1 < n && digit(text[j + 1])) {
            ++j;
            while (j < n && digit(text[j])) ++j;
        }
        if (j < n && (text[j] == 'e' || text[j] == 'E')) {
            std::size_t k = j + 1;
            if (k < n && (text[k] == '-' || text[k] == '+')) ++k;
            if (k < n && digit(text[k])) {
                ++k;
                while (k < n && digit(text[k])) ++k;
                j = k;
            }
        }
        std::string token(text.substr(start, j - start));
        out.push_back(std::strtod(token.c_str(), nullptr));
        i = j;
    }
    return out;
}

} // namespace tsqa
