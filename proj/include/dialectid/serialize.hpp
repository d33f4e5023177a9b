#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "dialectid/error.hpp"

namespace dialectid {

// Little-endian binary encoding for model payloads. Doubles are stored as
// their IEEE-754 bit pattern so a round trip is exact.
class BinaryWriter {
public:
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void boolean(bool v) { buf_.push_back(v ? 1 : 0); }
    void str(std::string_view s) {
        u64(s.size());
        buf_.append(s);
    }
    void f64s(const std::vector<double>& v) {
        u64(v.size());
        for (double x : v) f64(x);
    }
    void u64s(const std::vector<std::size_t>& v) {
        u64(v.size());
        for (auto x : v) u64(x);
    }
    void strs(const std::vector<std::string>& v) {
        u64(v.size());
        for (const auto& s : v) str(s);
    }

    const std::string& bytes() const { return buf_; }
    std::string take() { return std::move(buf_); }

private:
    std::string buf_;
};

class BinaryReader {
public:
    explicit BinaryReader(std::string_view data) : data_(data) {}

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    bool boolean() {
        need(1);
        return data_[pos_++] != 0;
    }
    std::string str() {
        const auto n = size();
        need(n);
        std::string s(data_.substr(pos_, n));
        pos_ += n;
        return s;
    }
    std::vector<double> f64s() {
        std::vector<double> v(size_of(8));
        for (auto& x : v) x = f64();
        return v;
    }
    std::vector<std::size_t> u64s() {
        std::vector<std::size_t> v(size_of(8));
        for (auto& x : v) x = static_cast<std::size_t>(u64());
        return v;
    }
    std::vector<std::string> strs() {
        std::vector<std::string> v(size_of(8));
        for (auto& s : v) s = str();
        return v;
    }
    /// A length prefix, checked against the bytes that remain.
    std::size_t size_of(std::size_t min_element_bytes) {
        const auto n = u64();
        if (min_element_bytes && n > (data_.size() - pos_) / min_element_bytes)
            throw ValidationError("model payload is corrupt: length prefix too large");
        return static_cast<std::size_t>(n);
    }
    std::size_t size() { return size_of(1); }

    bool at_end() const { return pos_ == data_.size(); }
    void expect_end() const {
        if (!at_end()) throw ValidationError("model payload has trailing bytes");
    }

private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) throw ValidationError("model payload is truncated");
    }

    std::string_view data_;
    std::size_t pos_ = 0;
};

}  // namespace dialectid
