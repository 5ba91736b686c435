#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qpmix {

/// Joint-level space I = I_1 x ... x I_k of k discrete variables.
/// Joint index is row-major: the last variable varies fastest.
class LevelSpace {
public:
    LevelSpace() = default;
    explicit LevelSpace(std::vector<int> cardinalities);

    std::size_t n_variables() const noexcept { return cards_.size(); }
    std::size_t size() const noexcept { return size_; }
    const std::vector<int>& cardinalities() const noexcept { return cards_; }

    std::size_t index(std::span<const int> levels) const;
    std::vector<int> decode(std::size_t index) const;
    int level_of(std::size_t index, std::size_t variable) const {
        return static_cast<int>((index / strides_[variable]) % static_cast<std::size_t>(cards_[variable]));
    }

    /// Index in the sub-space over `variables` (positions into this space).
    std::size_t project(std::size_t index, std::span<const std::size_t> variables) const;
    LevelSpace subspace(std::span<const std::size_t> variables) const;

private:
    std::vector<int> cards_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 1;
};

}  // namespace qpmix
