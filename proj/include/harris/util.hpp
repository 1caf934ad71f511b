#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>

namespace harris {

/// FNV-1a over the raw little-endian bytes of doubles; used to tie
/// certificates to the exact inputs they were extracted from.
class ContentHasher {
  public:
    ContentHasher& add(double x);
    ContentHasher& add(std::uint64_t x);
    ContentHasher& add(const Eigen::MatrixXd& m);
    ContentHasher& add(const Eigen::VectorXd& v);
    std::uint64_t value() const { return state_; }
    std::string hex() const;

  private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

/// splitmix64 stream; avoids implementation-defined std distributions so
/// reports are reproducible byte-for-byte across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    /// uniform in (0, 1]
    double next_open01();
    /// standard exponential
    double next_exponential();
    /// difference of two Dirichlet(1,...,1) draws: a zero-mean measure with TV <= 2
    Eigen::VectorXd next_zero_mean(std::size_t n);
    /// Dirichlet(1,...,1) probability vector
    Eigen::VectorXd next_probability(std::size_t n);
    /// uniform on [lo, hi)
    double next_uniform(double lo, double hi);
    /// uniform integer in [0, n)
    std::size_t next_index(std::size_t n);

  private:
    std::uint64_t state_;
};

}  // namespace harris
