#pragma once

#include <utility>
#include <vector>

namespace extcal {

// Strictly increasing list of basis indices in {0..dim-1}; the canonical key
// for graded components. Constructed through canonicalize() so arbitrary index
// orderings fold into the sorted key plus a permutation sign.
struct MultiIndex {
    std::vector<int> idx;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> sorted) : idx(std::move(sorted)) {}

    int size() const { return static_cast<int>(idx.size()); }

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.idx == b.idx; }
    friend bool operator<(const MultiIndex& a, const MultiIndex& b) { return a.idx < b.idx; }
};

// Sorts an index list, counting transpositions. Returns sign 0 if any index
// repeats, otherwise +1/-1 for even/odd permutations.
inline std::pair<MultiIndex, int> canonicalize(std::vector<int> raw) {
    int sign = 1;
    for (std::size_t i = 1; i < raw.size(); ++i) {
        int v = raw[i];
        std::size_t j = i;
        while (j > 0 && raw[j - 1] > v) {
            raw[j] = raw[j - 1];
            --j;
            sign = -sign;
        }
        raw[j] = v;
    }
    for (std::size_t i = 1; i < raw.size(); ++i)
        if (raw[i] == raw[i - 1]) return {MultiIndex{}, 0};
    return {MultiIndex(std::move(raw)), sign};
}

// All C(dim, grade) canonical multi-indices in lexicographic order.
inline std::vector<MultiIndex> canonical_basis(int dim, int grade) {
    std::vector<MultiIndex> out;
    if (grade < 0 || grade > dim) return out;
    std::vector<int> cur(grade);
    for (int i = 0; i < grade; ++i) cur[i] = i;
    while (true) {
        out.push_back(MultiIndex(cur));
        int i = grade - 1;
        while (i >= 0 && cur[i] == dim - grade + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < grade; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

} // namespace extcal
