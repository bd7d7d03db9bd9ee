#include <cstdio>
#include "manirad/harmonics.hpp"

using namespace manirad;

// True rotation matrix for degree k by quadrature projection:
// D_{ij} = int Y_k^i(Rx) Y_k^j(x) dsigma(x).
static Eigen::MatrixXd brute(int k, const Mat3& R) {
  const int nt = 30, np = 61, K = k;
  GaussRule gl = gauss_legendre(nt);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2 * k + 1, 2 * k + 1);
  for (int t = 0; t < nt; ++t) {
    const double z = gl.x[t];
    const double r = std::sqrt(1.0 - z * z);
    for (int p = 0; p < np; ++p) {
      const double phi = 2.0 * pi * p / np;
      Vec3 x(r * std::cos(phi), r * std::sin(phi), z);
      SphBlock bx = sph_block(K, x);
      SphBlock brx = sph_block(K, Vec3(R * x));
      const double w = gl.w[t] / 2.0 / np;
      for (int i = 1; i <= 2 * k + 1; ++i)
        for (int j = 1; j <= 2 * k + 1; ++j)
          D(i - 1, j - 1) += w * brx.at(k, i) * bx.at(k, j);
    }
  }
  return D;
}

int main() {
  Rng rng(7);
  RotationPoint g = rng.rotation_point();
  Mat3 R = g.matrix();
  auto d = sh_rotation_matrices(2, R);
  Eigen::MatrixXd B = brute(2, R);
  std::printf("recursion d2:\n");
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) std::printf("% .5f ", d[2](i, j));
    std::printf("\n");
  }
  std::printf("brute d2:\n");
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) std::printf("% .5f ", B(i, j));
    std::printf("\n");
  }
  std::printf("diff = %.3e, diff^T = %.3e\n",
              (d[2] - B).cwiseAbs().maxCoeff(),
              (d[2].transpose() - B).cwiseAbs().maxCoeff());
  return 0;
}
