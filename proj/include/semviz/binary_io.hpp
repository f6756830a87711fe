#pragma once

// Little-endian varint stream used by the index artifact.

#include "semviz/error.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semviz::io {

inline uint64_t fnv1a(std::string_view bytes) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

class Writer {
public:
    void u8(uint8_t v) { buf_.push_back(static_cast<char>(v)); }

    void varint(uint64_t v) {
        while (v >= 0x80) {
            u8(static_cast<uint8_t>(v | 0x80));
            v >>= 7;
        }
        u8(static_cast<uint8_t>(v));
    }

    void fixed64(uint64_t v) {
        for (int i = 0; i < 8; ++i) u8(static_cast<uint8_t>(v >> (8 * i)));
    }

    void str(std::string_view s) {
        varint(s.size());
        buf_.append(s);
    }

    void raw(std::string_view s) { buf_.append(s); }

    void opt_str(const std::optional<std::string>& s) {
        u8(s ? 1 : 0);
        if (s) str(*s);
    }

    void strings(const std::vector<std::string>& v) {
        varint(v.size());
        for (const auto& s : v) str(s);
    }

    // Ascending id list, delta coded.
    void sorted_ids(const std::vector<uint32_t>& ids) {
        varint(ids.size());
        uint32_t prev = 0;
        for (auto id : ids) {
            varint(id - prev);
            prev = id;
        }
    }

    const std::string& bytes() const { return buf_; }
    std::string take() { return std::move(buf_); }

private:
    std::string buf_;
};

class Reader {
public:
    explicit Reader(std::string_view data) : data_(data) {}

    uint8_t u8() {
        need(1);
        return static_cast<uint8_t>(data_[pos_++]);
    }

    uint64_t varint() {
        uint64_t v = 0;
        for (int shift = 0; shift < 64; shift += 7) {
            const uint8_t b = u8();
            v |= static_cast<uint64_t>(b & 0x7f) << shift;
            if (!(b & 0x80)) return v;
        }
        throw FormatError("corrupt index: varint overflow");
    }

    // Bounded count, guards allocations against corrupt input.
    size_t count() {
        const auto n = varint();
        if (n > data_.size() - pos_ + 1) throw FormatError("corrupt index: implausible length");
        return static_cast<size_t>(n);
    }

    uint64_t fixed64() {
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(u8()) << (8 * i);
        return v;
    }

    std::string str() {
        const auto n = count();
        need(n);
        std::string s(data_.substr(pos_, n));
        pos_ += n;
        return s;
    }

    std::string_view raw(size_t n) {
        need(n);
        auto s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    std::optional<std::string> opt_str() {
        if (u8()) return str();
        return std::nullopt;
    }

    std::vector<std::string> strings() {
        std::vector<std::string> v(count());
        for (auto& s : v) s = str();
        return v;
    }

    std::vector<uint32_t> sorted_ids() {
        std::vector<uint32_t> ids(count());
        uint64_t prev = 0;
        for (auto& id : ids) {
            prev += varint();
            if (prev > UINT32_MAX) throw FormatError("corrupt index: id out of range");
            id = static_cast<uint32_t>(prev);
        }
        return ids;
    }

    bool done() const { return pos_ == data_.size(); }

private:
    void need(size_t n) const {
        if (data_.size() - pos_ < n) throw FormatError("corrupt index: unexpected end of data");
    }

    std::string_view data_;
    size_t pos_ = 0;
};

} // namespace semviz::io
