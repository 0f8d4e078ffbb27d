#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ilct {

// Uniform grid on [0, T] with N >= 2 nodes t_i = i*h, h = T/(N-1).
class Grid {
  public:
    Grid(double horizon, int nodes);

    double horizon() const { return horizon_; }
    int nodes() const { return nodes_; }
    double step() const { return horizon_ / (nodes_ - 1); }
    double t(int i) const { return i * step(); }
    Eigen::VectorXd times() const;

    friend bool operator==(const Grid&, const Grid&) = default;

  private:
    double horizon_;
    int nodes_;
};

// Samples of a vector signal: values is N x channels.
class SampledSignal {
  public:
    SampledSignal(Grid grid, Eigen::MatrixXd values);
    static SampledSignal zeros(const Grid& grid, int channels);
    // Same constant vector at every node.
    static SampledSignal constant(const Grid& grid, const Eigen::VectorXd& v);

    const Grid& grid() const { return grid_; }
    int channels() const { return static_cast<int>(values_.cols()); }
    const Eigen::MatrixXd& values() const { return values_; }
    Eigen::MatrixXd& values() { return values_; }
    Eigen::VectorXd at(int i) const { return values_.row(i).transpose(); }

  private:
    Grid grid_;
    Eigen::MatrixXd values_;
};

SampledSignal operator+(const SampledSignal& a, const SampledSignal& b);
SampledSignal operator-(const SampledSignal& a, const SampledSignal& b);
// Constant gain applied at every node: out_i = k * f_i.
SampledSignal apply_gain(const Eigen::MatrixXd& k, const SampledSignal& f);

// CSV: header row "t,<names...>", 12 significant digits, LF endings.
void write_csv(std::ostream& os, const std::vector<std::string>& names,
               const std::vector<const SampledSignal*>& signals);
void write_csv(const std::string& path, const std::vector<std::string>& names,
               const std::vector<const SampledSignal*>& signals);

}  // namespace ilct
