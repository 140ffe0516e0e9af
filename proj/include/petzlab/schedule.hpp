#pragma once

#include "petzlab/operators.hpp"

namespace petzlab {

/// Operator-valued function of time: either a constant or values sampled on a
/// uniform grid. Sampled schedules are piecewise-linear between nodes and
/// clamped outside the grid.
class Schedule {
  public:
    Schedule() = default;

    static Schedule constant(Mat value) {
        Schedule s;
        s.nodes_.push_back(std::move(value));
        return s;
    }

    static Schedule sampled(double t0, double t1, std::vector<Mat> nodes) {
        if (nodes.size() < 2) throw std::invalid_argument("Schedule: need >= 2 nodes");
        if (!(t1 > t0)) throw std::invalid_argument("Schedule: t1 must exceed t0");
        Schedule s;
        s.t0_ = t0;
        s.t1_ = t1;
        s.nodes_ = std::move(nodes);
        return s;
    }

    bool is_constant() const { return nodes_.size() == 1; }
    int node_count() const { return static_cast<int>(nodes_.size()); }
    const Mat& node(int i) const { return nodes_.at(i); }
    double t0() const { return t0_; }
    double t1() const { return t1_; }
    int dim() const { return nodes_.empty() ? 0 : static_cast<int>(nodes_.front().rows()); }
    bool empty() const { return nodes_.empty(); }

    Mat at(double t) const {
        if (nodes_.empty()) throw std::logic_error("Schedule: empty");
        if (is_constant()) return nodes_.front();
        const int m = static_cast<int>(nodes_.size()) - 1;
        const double u = (t - t0_) / (t1_ - t0_) * m;
        if (u <= 0.0) return nodes_.front();
        if (u >= m) return nodes_.back();
        const int i = static_cast<int>(u);
        const double w = u - i;
        return (1.0 - w) * nodes_[i] + w * nodes_[i + 1];
    }

    /// Applies f to every node (used for lifting and rescaling).
    template <typename F>
    Schedule map(F&& f) const {
        Schedule s = *this;
        for (auto& n : s.nodes_) n = f(n);
        return s;
    }

    /// Same nodes on a new time interval.
    Schedule regrid(double t0, double t1) const {
        Schedule s = *this;
        s.t0_ = t0;
        s.t1_ = t1;
        return s;
    }

  private:
    double t0_ = 0.0, t1_ = 0.0;
    std::vector<Mat> nodes_;
};

}  // namespace petzlab
