#include "test_support.hpp"

#include <atomic>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

#include "patchprior/synthetic.hpp"

namespace patchprior::testing {

ImageBuffer smoke_image() { return piecewise_constant_image(64, 64, 20240601, 40); }

std::vector<ImageBuffer> synthetic_corpus(std::size_t count, std::size_t width,
                                          std::size_t height, std::uint64_t seed) {
  std::vector<ImageBuffer> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(textured_image(width, height, seed + 7919 * (i + 1),
                                 std::numeric_limits<double>::quiet_NaN()));
  }
  return out;
}

Eigen::MatrixXd random_spd(std::size_t d, std::mt19937_64& rng, double lo, double hi) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> eig(lo, hi);
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd lambda(n);
  for (Eigen::Index i = 0; i < n; ++i) lambda[i] = eig(rng);
  Eigen::MatrixXd s = q * lambda.asDiagonal() * q.transpose();
  return 0.5 * (s + s.transpose());
}

Gmm random_gmm(std::size_t k, std::size_t d, std::mt19937_64& rng, double scale, double cov_lo,
               double cov_hi) {
  std::uniform_real_distribution<double> w(0.2, 1.0);
  std::uniform_real_distribution<double> u(-scale, scale);
  Gmm g;
  g.weights.resize(static_cast<Eigen::Index>(k));
  for (std::size_t j = 0; j < k; ++j) {
    g.weights[static_cast<Eigen::Index>(j)] = w(rng);
    Eigen::VectorXd m(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < m.size(); ++i) m[i] = u(rng);
    g.means.push_back(m);
    g.covariances.push_back(random_spd(d, rng, cov_lo, cov_hi));
  }
  g.weights /= g.weights.sum();
  return g;
}

Eigen::MatrixXd random_responsibilities(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  Eigen::MatrixXd g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = e(rng);
    g.row(i) /= g.row(i).sum();
  }
  return g;
}

Eigen::MatrixXd random_matrix(std::size_t d, std::size_t n, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

double relative_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double denom = std::max(b.norm(), std::numeric_limits<double>::min());
  return (a - b).norm() / denom;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("patchprior_" + tag + "_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace patchprior::testing
