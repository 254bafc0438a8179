#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "madc/errors.hpp"

namespace madc {

// Packed bit string. Bit 0 is the most significant bit of byte 0, so the hex
// dump reads left to right in transmission order. Unused trailing bits of the
// last byte are kept at zero, which lets equality compare byte buffers directly.
class bit_vector {
  public:
    bit_vector() = default;
    explicit bit_vector(std::size_t nbits) : nbits_(nbits), bytes_((nbits + 7) / 8, 0) {}

    static bit_vector from_bytes(std::vector<std::uint8_t> bytes, std::size_t nbits) {
        if (bytes.size() != (nbits + 7) / 8)
            throw param_error("bit_vector::from_bytes: byte count does not match bit count");
        bit_vector v;
        v.nbits_ = nbits;
        v.bytes_ = std::move(bytes);
        v.mask_tail();
        return v;
    }

    std::size_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

    bool bit(std::size_t i) const {
        check_index(i);
        return (bytes_[i >> 3] >> (7 - (i & 7))) & 1u;
    }

    void set_bit(std::size_t i, bool value) {
        check_index(i);
        std::uint8_t mask = static_cast<std::uint8_t>(1u << (7 - (i & 7)));
        if (value)
            bytes_[i >> 3] |= mask;
        else
            bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
    }

    bit_vector& operator^=(const bit_vector& o) {
        if (nbits_ != o.nbits_)
            throw param_error("bit_vector xor: size mismatch (" + std::to_string(nbits_) +
                              " vs " + std::to_string(o.nbits_) + ")");
        for (std::size_t i = 0; i < bytes_.size(); ++i) bytes_[i] ^= o.bytes_[i];
        return *this;
    }
    friend bit_vector operator^(bit_vector a, const bit_vector& b) { return a ^= b; }

    bit_vector slice(std::size_t pos, std::size_t len) const {
        if (pos + len > nbits_) throw param_error("bit_vector slice out of range");
        bit_vector out(len);
        if ((pos & 7) == 0) {
            for (std::size_t i = 0; i < out.bytes_.size(); ++i)
                out.bytes_[i] = bytes_[(pos >> 3) + i];
            out.mask_tail();
        } else {
            for (std::size_t i = 0; i < len; ++i) out.set_bit(i, bit(pos + i));
        }
        return out;
    }

    void append(const bit_vector& o) {
        if ((nbits_ & 7) == 0) {
            bytes_.insert(bytes_.end(), o.bytes_.begin(), o.bytes_.end());
            nbits_ += o.nbits_;
            return;
        }
        std::size_t base = nbits_;
        nbits_ += o.nbits_;
        bytes_.resize((nbits_ + 7) / 8, 0);
        for (std::size_t i = 0; i < o.nbits_; ++i) set_bit(base + i, o.bit(i));
    }

    bool all_zero() const {
        for (std::uint8_t b : bytes_)
            if (b) return false;
        return true;
    }

    // Whole bytes as two lowercase hex digits each; trailing pad bits are zero.
    std::string to_hex() const {
        static const char digits[] = "0123456789abcdef";
        std::string s;
        s.reserve(bytes_.size() * 2);
        for (std::uint8_t b : bytes_) {
            s.push_back(digits[b >> 4]);
            s.push_back(digits[b & 0xf]);
        }
        return s;
    }

    friend bool operator==(const bit_vector&, const bit_vector&) = default;

  private:
    void check_index(std::size_t i) const {
        if (i >= nbits_)
            throw param_error("bit_vector index " + std::to_string(i) + " out of range (size " +
                              std::to_string(nbits_) + ")");
    }

    void mask_tail() {
        if (nbits_ & 7) bytes_.back() &= static_cast<std::uint8_t>(0xff << (8 - (nbits_ & 7)));
    }

    std::size_t nbits_ = 0;
    std::vector<std::uint8_t> bytes_;
};

}  // namespace madc
