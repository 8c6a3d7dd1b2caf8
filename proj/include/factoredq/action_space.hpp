#ifndef FACTOREDQ_ACTION_SPACE_HPP
#define FACTOREDQ_ACTION_SPACE_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace factoredq {

/// A K-bit action. Validity depends on the ActionSpace it is used with.
class ActionVector {
public:
    ActionVector() = default;
    explicit ActionVector(std::size_t k) : bits_(k, 0) {}
    explicit ActionVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}
    ActionVector(std::initializer_list<int> bits) {
        bits_.reserve(bits.size());
        for (int b : bits) bits_.push_back(b != 0 ? 1 : 0);
    }

    std::size_t size() const { return bits_.size(); }
    std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
    std::uint8_t& operator[](std::size_t i) { return bits_[i]; }
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    std::size_t count() const { return std::accumulate(bits_.begin(), bits_.end(), std::size_t{0}); }

    friend bool operator==(const ActionVector&, const ActionVector&) = default;
    friend auto operator<=>(const ActionVector&, const ActionVector&) = default;

    friend std::ostream& operator<<(std::ostream& os, const ActionVector& a) {
        os << '(';
        for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << int(a[i]);
        return os << ')';
    }

private:
    std::vector<std::uint8_t> bits_;
};

enum class SpaceKind { one_hot, binary, factored };

/// A contiguous one-hot block [offset, offset + size) of a factored action.
struct Group {
    std::size_t offset;
    std::size_t size;
};

/// Describes the action set: one-hot over K choices, free K-bit vectors, or a
/// concatenation of one-hot groups. one_hot(K) carries a single group and
/// behaves as factored({K}) everywhere except `kind()`.
class ActionSpace {
public:
    static ActionSpace one_hot(std::size_t k) {
        if (k == 0) throw std::invalid_argument("one_hot action space needs K >= 1");
        return ActionSpace(SpaceKind::one_hot, {k});
    }

    static ActionSpace binary(std::size_t k) {
        if (k == 0) throw std::invalid_argument("binary action space needs K >= 1");
        return ActionSpace(SpaceKind::binary, {k});
    }

    static ActionSpace factored(std::vector<std::size_t> sizes) {
        if (sizes.empty()) throw std::invalid_argument("factored action space needs at least one group");
        for (std::size_t s : sizes) {
            if (s == 0) throw std::invalid_argument("factored group sizes must be >= 1");
        }
        return ActionSpace(SpaceKind::factored, std::move(sizes));
    }

    SpaceKind kind() const { return kind_; }
    bool is_binary() const { return kind_ == SpaceKind::binary; }
    /// one_hot and factored spaces are both sequences of one-hot groups.
    bool is_grouped() const { return kind_ != SpaceKind::binary; }

    std::size_t bit_length() const { return bit_length_; }

    /// Empty for binary spaces.
    const std::vector<Group>& groups() const { return groups_; }

    /// Number of valid actions, saturating at SIZE_MAX.
    std::size_t action_count() const {
        constexpr std::size_t cap = static_cast<std::size_t>(-1);
        if (is_binary()) return bit_length_ >= 64 ? cap : std::size_t{1} << bit_length_;
        std::size_t n = 1;
        for (const Group& g : groups_) {
            if (n > cap / g.size) return cap;
            n *= g.size;
        }
        return n;
    }

    bool is_valid(const ActionVector& a) const {
        if (a.size() != bit_length_) return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] > 1) return false;
        }
        for (const Group& g : groups_) {
            std::size_t set = 0;
            for (std::size_t i = 0; i < g.size; ++i) set += a[g.offset + i];
            if (set != 1) return false;
        }
        return true;
    }

    void require_valid(const ActionVector& a) const {
        if (!is_valid(a)) {
            throw std::invalid_argument("action is not valid for " + describe());
        }
    }

    void require_length(std::size_t n, const char* what) const {
        if (n != bit_length_) {
            throw std::invalid_argument(std::string(what) + " length " + std::to_string(n) +
                                        " does not match action bit length " + std::to_string(bit_length_));
        }
    }

    std::string describe() const {
        switch (kind_) {
            case SpaceKind::one_hot: return "one_hot(" + std::to_string(bit_length_) + ")";
            case SpaceKind::binary: return "binary(" + std::to_string(bit_length_) + ")";
            case SpaceKind::factored: break;
        }
        std::string s = "factored[";
        for (std::size_t j = 0; j < groups_.size(); ++j) s += (j ? "," : "") + std::to_string(groups_[j].size);
        return s + "]";
    }

    friend bool operator==(const ActionSpace& a, const ActionSpace& b) {
        return a.kind_ == b.kind_ && a.sizes_ == b.sizes_;
    }

private:
    ActionSpace(SpaceKind kind, std::vector<std::size_t> sizes) : kind_(kind), sizes_(std::move(sizes)) {
        bit_length_ = std::accumulate(sizes_.begin(), sizes_.end(), std::size_t{0});
        if (kind_ != SpaceKind::binary) {
            std::size_t offset = 0;
            for (std::size_t s : sizes_) {
                groups_.push_back({offset, s});
                offset += s;
            }
        }
    }

    SpaceKind kind_;
    std::vector<std::size_t> sizes_;
    std::vector<Group> groups_;
    std::size_t bit_length_ = 0;
};

}  // namespace factoredq

#endif  // FACTOREDQ_ACTION_SPACE_HPP
