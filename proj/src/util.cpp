#include "harris/util.hpp"

#include <bit>
#include <cmath>

namespace harris {

namespace {
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;
}

ContentHasher& ContentHasher::add(std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
        state_ ^= (x >> (8 * i)) & 0xffULL;
        state_ *= kFnvPrime;
    }
    return *this;
}

ContentHasher& ContentHasher::add(double x) { return add(std::bit_cast<std::uint64_t>(x)); }

ContentHasher& ContentHasher::add(const Eigen::MatrixXd& m) {
    add(static_cast<std::uint64_t>(m.rows()));
    add(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) add(m(i, j));
    return *this;
}

ContentHasher& ContentHasher::add(const Eigen::VectorXd& v) {
    add(static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) add(v[i]);
    return *this;
}

std::string ContentHasher::hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    std::uint64_t v = state_;
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

std::uint64_t Rng::next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::next_open01() {
    // 53 random bits into (0, 1]
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double Rng::next_exponential() { return -std::log(next_open01()); }

Eigen::VectorXd Rng::next_probability(std::size_t n) {
    Eigen::VectorXd p(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) p[static_cast<Eigen::Index>(i)] = next_exponential();
    return p / p.sum();
}

Eigen::VectorXd Rng::next_zero_mean(std::size_t n) { return next_probability(n) - next_probability(n); }

double Rng::next_uniform(double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(next_u64() >> 11) * 0x1.0p-53); }

std::size_t Rng::next_index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

}  // namespace harris
