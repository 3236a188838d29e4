#include "disklab/detail/broad_phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace disklab::detail {

namespace {

// Multi-level uniform grid: a box lives on the level whose cell size first covers
// it and is stored in every cell it touches (at most four).
class LevelGrid {
public:
    LevelGrid(const std::vector<Box>& boxes, const std::vector<char>& skip) : boxes_(boxes) {
        double smallest = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < boxes.size(); ++i)
            if (!skip[i]) smallest = std::min(smallest, size(boxes[i]));
        if (std::isfinite(smallest)) base_ = std::max(smallest, 1e-300);
        level_.assign(boxes.size(), -1);
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            if (skip[i]) continue;
            int lv = 0;
            while (cell(lv) < size(boxes[i])) ++lv;
            level_[i] = lv;
            max_level_ = std::max(max_level_, lv);
            for_cells(boxes[i], lv, [&](std::uint64_t key) { entries_.push_back({key, static_cast<std::uint32_t>(i)}); });
        }
        std::sort(entries_.begin(), entries_.end());
    }

    int level(std::uint32_t i) const { return level_[i]; }

    // Boxes on levels >= level(i) sharing a cell with box i.
    template <class F>
    void query(std::uint32_t i, F&& visit) const {
        for (int lv = level_[i]; lv <= max_level_; ++lv)
            for_cells(boxes_[i], lv, [&](std::uint64_t key) {
                auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair<std::uint64_t, std::uint32_t>{key, 0});
                for (; it != entries_.end() && it->first == key; ++it) visit(it->second);
            });
    }

private:
    static double size(const Box& b) { return std::max(b.width(), b.height()); }
    double cell(int lv) const { return std::ldexp(base_, lv); }

    template <class F>
    void for_cells(const Box& b, int lv, F&& f) const {
        const double c = cell(lv);
        const auto x1 = static_cast<std::int64_t>(std::floor(b.x1 / c)), x2 = static_cast<std::int64_t>(std::floor(b.x2 / c));
        const auto y1 = static_cast<std::int64_t>(std::floor(b.y1 / c)), y2 = static_cast<std::int64_t>(std::floor(b.y2 / c));
        for (std::int64_t x = x1; x <= x2; ++x)
            for (std::int64_t y = y1; y <= y2; ++y) f(key(lv, x, y));
    }

    // Cells far apart may share a key; that only costs extra candidates.
    static std::uint64_t key(int lv, std::int64_t x, std::int64_t y) {
        const auto mask = (std::uint64_t{1} << 28) - 1;
        return (static_cast<std::uint64_t>(lv) << 56) | ((static_cast<std::uint64_t>(x) & mask) << 28) |
               (static_cast<std::uint64_t>(y) & mask);
    }

    const std::vector<Box>& boxes_;
    double base_ = 1.0;
    int max_level_ = 0;
    std::vector<int> level_;
    std::vector<std::pair<std::uint64_t, std::uint32_t>> entries_;
};

}  // namespace

std::vector<std::pair<std::uint32_t, std::uint32_t>> box_pairs(const std::vector<Box>& boxes0, const std::vector<char>& skip,
                                                               double slack) {
    std::vector<Box> boxes = boxes0;
    for (Box& b : boxes) b = {b.x1 - slack, b.x2 + slack, b.y1 - slack, b.y2 + slack};
    const LevelGrid grid(boxes, skip);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    std::vector<std::uint32_t> cand;
    for (std::uint32_t a = 0; a < boxes.size(); ++a) {
        if (skip[a]) continue;
        cand.clear();
        grid.query(a, [&](std::uint32_t b) {
            if (b == a || (grid.level(b) == grid.level(a) && b < a)) return;
            cand.push_back(b);
        });
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        const Box& x = boxes[a];
        for (std::uint32_t b : cand) {
            const Box& y = boxes[b];
            if (x.x1 <= y.x2 && y.x1 <= x.x2 && x.y1 <= y.y2 && y.y1 <= x.y2) pairs.push_back({std::min(a, b), std::max(a, b)});
        }
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

}  // namespace disklab::detail
