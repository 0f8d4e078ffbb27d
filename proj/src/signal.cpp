#include "ilct/signal.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "ilct/errors.hpp"

namespace ilct {

Grid::Grid(double horizon, int nodes) : horizon_(horizon), nodes_(nodes) {
    if (nodes < 2) {
        throw Error("Grid: at least two nodes are required");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw Error("Grid: horizon must be positive and finite");
    }
}

Eigen::VectorXd Grid::times() const {
    Eigen::VectorXd t(nodes_);
    for (int i = 0; i < nodes_; ++i) {
        t(i) = this->t(i);
    }
    return t;
}

SampledSignal::SampledSignal(Grid grid, Eigen::MatrixXd values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.rows() != grid_.nodes()) {
        throw DimensionError("SampledSignal: row count differs from grid node count");
    }
    if (!values_.allFinite()) {
        throw Error("SampledSignal: non-finite sample");
    }
}

SampledSignal SampledSignal::zeros(const Grid& grid, int channels) {
    return SampledSignal(grid, Eigen::MatrixXd::Zero(grid.nodes(), channels));
}

SampledSignal SampledSignal::constant(const Grid& grid, const Eigen::VectorXd& v) {
    return SampledSignal(grid, Eigen::VectorXd::Ones(grid.nodes()) * v.transpose());
}

namespace {

void require_compatible(const SampledSignal& a, const SampledSignal& b) {
    if (!(a.grid() == b.grid()) || a.channels() != b.channels()) {
        throw DimensionError("sampled signals differ in grid or channel count");
    }
}

}  // namespace

SampledSignal operator+(const SampledSignal& a, const SampledSignal& b) {
    require_compatible(a, b);
    return SampledSignal(a.grid(), a.values() + b.values());
}

SampledSignal operator-(const SampledSignal& a, const SampledSignal& b) {
    require_compatible(a, b);
    return SampledSignal(a.grid(), a.values() - b.values());
}

SampledSignal apply_gain(const Eigen::MatrixXd& k, const SampledSignal& f) {
    if (k.cols() != f.channels()) {
        throw DimensionError("apply_gain: gain columns differ from channel count");
    }
    return SampledSignal(f.grid(), f.values() * k.transpose());
}

void write_csv(std::ostream& os, const std::vector<std::string>& names,
               const std::vector<const SampledSignal*>& signals) {
    if (signals.empty()) {
        throw Error("write_csv: no signals");
    }
    const Grid& grid = signals.front()->grid();
    int total = 0;
    for (const auto* s : signals) {
        if (!(s->grid() == grid)) {
            throw DimensionError("write_csv: signals on different grids");
        }
        total += s->channels();
    }
    if (static_cast<int>(names.size()) != total) {
        throw DimensionError("write_csv: column name count differs from channel count");
    }
    os << "t";
    for (const auto& n : names) {
        os << ',' << n;
    }
    os << '\n';
    char buf[64];
    for (int i = 0; i < grid.nodes(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g", grid.t(i));
        os << buf;
        for (const auto* s : signals) {
            for (int c = 0; c < s->channels(); ++c) {
                std::snprintf(buf, sizeof buf, "%.12g", s->values()(i, c));
                os << ',' << buf;
            }
        }
        os << '\n';
    }
}

void write_csv(const std::string& path, const std::vector<std::string>& names,
               const std::vector<const SampledSignal*>& signals) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw Error("write_csv: cannot open " + path);
    }
    write_csv(os, names, signals);
}

}  // namespace ilct
