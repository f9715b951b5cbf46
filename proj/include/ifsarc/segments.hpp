#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "polyline.hpp"

namespace ifsarc {

/// A list of segments with a bounding-volume hierarchy over consecutive runs. Curve data keeps
/// neighbouring segments close, so splitting by index gives tight boxes without any sorting.
class SegmentSet {
public:
    explicit SegmentSet(int dim = 2) : dim_(dim) {}

    /// Segments first..last-1 of a polyline.
    static SegmentSet from_polyline(const Polyline& p, std::size_t first = 0, std::size_t last = std::numeric_limits<std::size_t>::max()) {
        SegmentSet s(p.dim);
        last = std::min(last, p.segments());
        for (std::size_t i = first; i < last; ++i) s.add(p.point(i), p.point(i + 1), i);
        return s;
    }

    /// Same, keeping only the parts of each segment outside the open ball B(center, radius).
    static SegmentSet outside_ball(const Polyline& p, std::size_t first, std::size_t last, std::span<const double> center, double radius) {
        SegmentSet s(p.dim);
        const std::size_t n = static_cast<std::size_t>(p.dim);
        std::vector<double> u(n), v(n);
        for (std::size_t i = first; i < std::min(last, p.segments()); ++i) {
            auto a = p.point(i), b = p.point(i + 1);
            // |a + t(b − a) − c|² < ρ² on (t1, t2).
            double qa = 0, qb = 0, qc = -radius * radius;
            for (std::size_t k = 0; k < n; ++k) {
                const double d = b[k] - a[k], w = a[k] - center[k];
                qa += d * d, qb += 2 * d * w, qc += w * w;
            }
            const double disc = qb * qb - 4 * qa * qc;
            if (qa == 0 || disc <= 0) {
                if (qc >= 0) s.add(a, b, i);
                continue;
            }
            const double sq = std::sqrt(disc);
            const double t1 = (-qb - sq) / (2 * qa), t2 = (-qb + sq) / (2 * qa);
            auto lerp = [&](double t, std::vector<double>& out) {
                for (std::size_t k = 0; k < n; ++k) out[k] = a[k] + t * (b[k] - a[k]);
            };
            if (t1 > 0) {
                lerp(std::min(t1, 1.0), v);
                s.add(a, v, i);
            }
            if (t2 < 1) {
                lerp(std::max(t2, 0.0), u);
                s.add(u, b, i);
            }
        }
        return s;
    }

    void add(std::span<const double> a, std::span<const double> b, std::size_t tag) {
        coords_.insert(coords_.end(), a.begin(), a.end());
        coords_.insert(coords_.end(), b.begin(), b.end());
        tags_.push_back(tag);
        nodes_.clear();
    }

    std::size_t size() const noexcept { return tags_.size(); }
    bool empty() const noexcept { return tags_.empty(); }
    int dim() const noexcept { return dim_; }
    std::span<const double> a(std::size_t i) const { return {coords_.data() + 2 * i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)}; }
    std::span<const double> b(std::size_t i) const { return {coords_.data() + (2 * i + 1) * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)}; }
    /// Index of the polyline segment this piece came from.
    std::size_t tag(std::size_t i) const { return tags_[i]; }

    struct Closest {
        double distance = std::numeric_limits<double>::infinity();
        std::size_t first = 0, second = 0;  // segment indices in the two sets
    };

    /// Minimum distance between the two segment sets.
    friend Closest min_distance(const SegmentSet& x, const SegmentSet& y) {
        Closest best;
        if (x.empty() || y.empty()) return best;
        x.build();
        y.build();
        std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
        while (!stack.empty()) {
            auto [i, j] = stack.back();
            stack.pop_back();
            const Node& nx = x.nodes_[i];
            const Node& ny = y.nodes_[j];
            if (box_distance(nx.box, ny.box) >= best.distance) continue;
            const bool leaf_x = nx.left == 0, leaf_y = ny.left == 0;
            if (leaf_x && leaf_y) {
                for (std::size_t s = nx.lo; s < nx.hi; ++s)
                    for (std::size_t t = ny.lo; t < ny.hi; ++t) {
                        const double d = segment_segment_distance(x.a(s), x.b(s), y.a(t), y.b(t));
                        if (d < best.distance) best = {d, s, t};
                    }
                continue;
            }
            // Split the larger node; push the farther child first so the nearer one is explored first.
            const bool split_x = !leaf_x && (leaf_y || nx.box.diagonal() >= ny.box.diagonal());
            std::pair<std::size_t, std::size_t> c1, c2;
            double d1, d2;
            if (split_x) {
                c1 = {nx.left, j}, c2 = {nx.right, j};
                d1 = box_distance(x.nodes_[nx.left].box, ny.box), d2 = box_distance(x.nodes_[nx.right].box, ny.box);
            } else {
                c1 = {i, ny.left}, c2 = {i, ny.right};
                d1 = box_distance(nx.box, y.nodes_[ny.left].box), d2 = box_distance(nx.box, y.nodes_[ny.right].box);
            }
            if (d1 < d2) std::swap(c1, c2);
            stack.push_back(c1);
            stack.push_back(c2);
        }
        return best;
    }

    /// Distance from a point to the segment set.
    friend double distance_to(const SegmentSet& s, std::span<const double> x) {
        double best = std::numeric_limits<double>::infinity();
        if (s.empty()) return best;
        s.build();
        Box px = Box::empty(s.dim_);
        px.extend(x);
        std::vector<std::size_t> stack{0};
        while (!stack.empty()) {
            const Node& nd = s.nodes_[stack.back()];
            stack.pop_back();
            if (box_distance(nd.box, px) >= best) continue;
            if (nd.left == 0) {
                for (std::size_t k = nd.lo; k < nd.hi; ++k) best = std::min(best, point_segment_distance(x, s.a(k), s.b(k)));
                continue;
            }
            const double dl = box_distance(s.nodes_[nd.left].box, px), dr = box_distance(s.nodes_[nd.right].box, px);
            if (dl < dr) {
                stack.push_back(nd.right);
                stack.push_back(nd.left);
            } else {
                stack.push_back(nd.left);
                stack.push_back(nd.right);
            }
        }
        return best;
    }

private:
    struct Node {
        Box box;
        std::size_t lo = 0, hi = 0, left = 0, right = 0;
    };

    void build() const {
        if (!nodes_.empty() || tags_.empty()) return;
        nodes_.reserve(2 * tags_.size() / leaf + 2);
        make(0, tags_.size());
    }

    std::size_t make(std::size_t lo, std::size_t hi) const {
        const std::size_t id = nodes_.size();
        nodes_.push_back({Box::empty(dim_), lo, hi, 0, 0});
        if (hi - lo <= leaf) {
            Box box = Box::empty(dim_);
            for (std::size_t s = lo; s < hi; ++s) box.extend(a(s)), box.extend(b(s));
            nodes_[id].box = std::move(box);
            return id;
        }
        const std::size_t mid = lo + (hi - lo) / 2;
        const std::size_t l = make(lo, mid);
        const std::size_t r = make(mid, hi);
        Box box = nodes_[l].box;
        box.extend(nodes_[r].box);
        nodes_[id].box = std::move(box);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }

    static constexpr std::size_t leaf = 8;
    int dim_;
    std::vector<double> coords_;
    std::vector<std::size_t> tags_;
    mutable std::vector<Node> nodes_;
};

}  // namespace ifsarc
