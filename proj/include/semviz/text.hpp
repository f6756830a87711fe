#pragma once

// UTF-8 helpers: trimming, Unicode case folding and tokenization.

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace semviz::text {

namespace detail {

template <typename Fn>
inline void for_each_code_point(std::string_view s, Fn&& fn) {
    const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
    const auto length = static_cast<int32_t>(s.size());
    int32_t i = 0;
    while (i < length) {
        const int32_t start = i;
        UChar32 c = 0;
        U8_NEXT(bytes, i, length, c);
        if (c < 0) c = 0xFFFD;
        fn(c, static_cast<size_t>(start), static_cast<size_t>(i));
    }
}

inline void append_utf8(std::string& out, UChar32 c) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t n = 0;
    UBool error = false;
    U8_APPEND(buf, n, U8_MAX_LENGTH, c, error);
    if (error) return;
    out.append(reinterpret_cast<const char*>(buf), static_cast<size_t>(n));
}

} // namespace detail

inline bool is_space(UChar32 c) { return u_isUWhiteSpace(c); }

inline std::string_view trim(std::string_view s) {
    size_t begin = s.size();
    size_t end = 0;
    detail::for_each_code_point(s, [&](UChar32 c, size_t from, size_t to) {
        if (is_space(c)) return;
        if (begin == s.size()) begin = from;
        end = to;
    });
    if (begin == s.size()) return {};
    return s.substr(begin, end - begin);
}

// Full-string simple Unicode case fold.
inline std::string fold(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    detail::for_each_code_point(s, [&](UChar32 c, size_t, size_t) {
        detail::append_utf8(out, u_foldCase(c, U_FOLD_CASE_DEFAULT));
    });
    return out;
}

// Trim followed by case fold: the comparison key for every term in the engine.
inline std::string key(std::string_view s) { return fold(trim(s)); }

inline size_t code_point_count(std::string_view s) {
    size_t n = 0;
    detail::for_each_code_point(s, [&](UChar32, size_t, size_t) { ++n; });
    return n;
}

struct TokenizerOptions {
    size_t min_length = 2;
    std::set<std::string> stopwords;
};

// Splits on any code point that is not a letter or digit, folds case and
// drops tokens shorter than `min_length` code points. No stemming.
inline std::vector<std::string> tokenize(std::string_view s, const TokenizerOptions& opts = {}) {
    std::vector<std::string> tokens;
    std::string current;
    size_t current_len = 0;
    auto flush = [&] {
        if (current_len >= opts.min_length && !opts.stopwords.contains(current)) {
            tokens.push_back(std::move(current));
        }
        current.clear();
        current_len = 0;
    };
    detail::for_each_code_point(s, [&](UChar32 c, size_t, size_t) {
        if (u_isalnum(c)) {
            detail::append_utf8(current, u_foldCase(c, U_FOLD_CASE_DEFAULT));
            ++current_len;
        } else {
            flush();
        }
    });
    flush();
    return tokens;
}

// Orders digit-only strings numerically, everything else bytewise; digit-only sorts first.
inline bool natural_less(std::string_view a, std::string_view b) {
    auto digits = [](std::string_view s) {
        if (s.empty()) return false;
        for (char ch : s) {
            if (ch < '0' || ch > '9') return false;
        }
        return true;
    };
    const bool da = digits(a);
    const bool db = digits(b);
    if (da != db) return da;
    if (da) {
        auto strip = [](std::string_view s) {
            const auto p = s.find_first_not_of('0');
            return p == std::string_view::npos ? std::string_view{} : s.substr(p);
        };
        const auto sa = strip(a);
        const auto sb = strip(b);
        if (sa.size() != sb.size()) return sa.size() < sb.size();
        if (sa != sb) return sa < sb;
    }
    return a < b;
}

} // namespace semviz::text
