#include "qpmix/level_space.hpp"

#include "qpmix/errors.hpp"

namespace qpmix {

LevelSpace::LevelSpace(std::vector<int> cardinalities) : cards_(std::move(cardinalities)) {
    strides_.assign(cards_.size(), 1);
    size_ = 1;
    for (std::size_t k = cards_.size(); k-- > 0;) {
        if (cards_[k] < 1) throw ConfigError("discrete variables need at least one level");
        strides_[k] = size_;
        size_ *= static_cast<std::size_t>(cards_[k]);
    }
}

std::size_t LevelSpace::index(std::span<const int> levels) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < cards_.size(); ++k) idx += strides_[k] * static_cast<std::size_t>(levels[k]);
    return idx;
}

std::vector<int> LevelSpace::decode(std::size_t index) const {
    std::vector<int> out(cards_.size());
    for (std::size_t k = 0; k < cards_.size(); ++k) out[k] = level_of(index, k);
    return out;
}

std::size_t LevelSpace::project(std::size_t index, std::span<const std::size_t> variables) const {
    std::size_t idx = 0;
    for (std::size_t var : variables) idx = idx * static_cast<std::size_t>(cards_[var]) + level_of(index, var);
    return idx;
}

LevelSpace LevelSpace::subspace(std::span<const std::size_t> variables) const {
    std::vector<int> cards;
    cards.reserve(variables.size());
    for (std::size_t var : variables) cards.push_back(cards_[var]);
    return LevelSpace(std::move(cards));
}

}  // namespace qpmix
