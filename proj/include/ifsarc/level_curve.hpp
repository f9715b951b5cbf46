#pragma once

#include <cmath>
#include <vector>

#include "ifs_path.hpp"

namespace ifsarc {

/// Approximation of γ by pieces S_w(I) over the maximal words w with r_w ≤ rmax^level. Every piece lies within
/// the same Hausdorff bound as T^level(I); when all ratios are equal the pieces are exactly those of T^level(I),
/// otherwise small copies are refined less and large ones more.
struct LevelCurve {
    int level = 0;
    Polyline polyline;                    // vertex k is S_{w_k}(0); the last vertex is e1
    std::vector<int> letters;             // words w_k stored back to back
    std::vector<std::size_t> word_start;  // w_k = letters[word_start[k] .. word_start[k + 1])
    std::vector<std::size_t> copy_start;  // vertex index where copy i (0-based) begins; copy_start[N] = last vertex
    double error_bound = 0;

    std::size_t pieces() const noexcept { return polyline.segments(); }
    Word word(std::size_t k) const {
        return Word{{letters.begin() + static_cast<std::ptrdiff_t>(word_start[k]), letters.begin() + static_cast<std::ptrdiff_t>(word_start[k + 1])}};
    }
    int copy_of_piece(std::size_t k) const { return letters[word_start[k]] - 1; }
};

inline LevelCurve level_curve(const IfsPath& path, int level, std::size_t budget = default_point_budget) {
    if (level < 1) throw InvalidInput("level must be at least 1");
    const std::size_t n = path.size();
    const auto maps = path.numeric();
    const double rmax = path.max_ratio();
    const double threshold = std::pow(rmax, level) * (1 + 1e-9);
    LevelCurve c;
    c.level = level;
    c.polyline = Polyline(path.dim());
    c.error_bound = curve_error_bound(rmax, level, first_step_distance(path).upper);
    c.word_start.push_back(0);
    c.copy_start.assign(n + 1, 0);
    struct Item {
        std::vector<int> word;
        AffineMap map;
    };
    std::vector<Item> stack;
    for (std::size_t i = n; i-- > 0;) stack.push_back({{static_cast<int>(i + 1)}, maps[i]});
    const std::vector<double> origin(static_cast<std::size_t>(path.dim()), 0.0);
    int current_copy = -1;
    while (!stack.empty()) {
        Item it = std::move(stack.back());
        stack.pop_back();
        if (it.map.ratio > threshold) {
            for (std::size_t i = n; i-- > 0;) {
                auto w = it.word;
                w.push_back(static_cast<int>(i + 1));
                stack.push_back({std::move(w), it.map.then_inner(maps[i])});
            }
            continue;
        }
        if (c.polyline.size() + 2 > budget)
            throw BudgetError("level " + std::to_string(level) + " needs more than the budget of " + std::to_string(budget) + " points");
        if (it.word.front() - 1 != current_copy) {
            current_copy = it.word.front() - 1;
            c.copy_start[static_cast<std::size_t>(current_copy)] = c.polyline.size();
        }
        c.polyline.push(it.map(origin));
        c.letters.insert(c.letters.end(), it.word.begin(), it.word.end());
        c.word_start.push_back(c.letters.size());
    }
    std::vector<double> e1 = origin;
    e1[0] = 1;
    c.polyline.push(e1);
    c.copy_start[n] = c.polyline.size() - 1;
    return c;
}

}  // namespace ifsarc
