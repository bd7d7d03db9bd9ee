#include <cstdio>
#include "manirad/harmonics.hpp"

using namespace manirad;

int main() {
  Rng rng(42);
  // 1) Orthonormality of Y_k^i under Gauss x trapezoid quadrature.
  {
    const int K = 8, nt = 40, np = 81;
    GaussRule gl = gauss_legendre(nt);
    double worst = 0.0;
    for (int ka = 0; ka <= K; ++ka)
      for (int ia = 1; ia <= 2 * ka + 1; ++ia)
        for (int kb = ka; kb <= K; ++kb)
          for (int ib = (kb == ka ? ia : 1); ib <= 2 * kb + 1; ++ib) {
            double s = 0.0;
            for (int t = 0; t < nt; ++t) {
              const double z = gl.x[t];
              const double r = std::sqrt(1.0 - z * z);
              double srow = 0.0;
              for (int p = 0; p < np; ++p) {
                const double phi = 2.0 * pi * p / np;
                Vec3 x(r * std::cos(phi), r * std::sin(phi), z);
                SphBlock b = sph_block(K, x);
                srow += b.at(ka, ia) * b.at(kb, ib);
              }
              s += srow / np * gl.w[t] / 2.0;
            }
            const double want = (ka == kb && ia == ib) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(s - want));
          }
    std::printf("S2 orthonormality worst err = %.3e\n", worst);
  }
  // 2) Rotation matrices: defining relation + orthogonality + homomorphism.
  {
    const int K = 10;
    double worst_rel = 0.0, worst_orth = 0.0, worst_hom = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      RotationPoint g = rng.rotation_point();
      Mat3 R = g.matrix();
      auto d = sh_rotation_matrices(K, R);
      for (int rep = 0; rep < 20; ++rep) {
        Vec3 x = rng.sphere_point();
        SphBlock bx = sph_block(K, x);
        SphBlock brx = sph_block(K, Vec3(R * x));
        for (int k = 0; k <= K; ++k)
          for (int i = 1; i <= 2 * k + 1; ++i) {
            double s = 0.0;
            for (int j = 1; j <= 2 * k + 1; ++j) s += d[k](i - 1, j - 1) * bx.at(k, j);
            worst_rel = std::max(worst_rel, std::abs(s - brx.at(k, i)));
          }
      }
      for (int k = 0; k <= K; ++k) {
        Eigen::MatrixXd e = d[k] * d[k].transpose() - Eigen::MatrixXd::Identity(2 * k + 1, 2 * k + 1);
        worst_orth = std::max(worst_orth, e.cwiseAbs().maxCoeff());
      }
      RotationPoint h = rng.rotation_point();
      auto dh = sh_rotation_matrices(K, h.matrix());
      auto dgh = sh_rotation_matrices(K, Mat3(R * h.matrix()));
      for (int k = 0; k <= K; ++k) {
        Eigen::MatrixXd e = d[k] * dh[k] - dgh[k];
        worst_hom = std::max(worst_hom, e.cwiseAbs().maxCoeff());
      }
    }
    std::printf("rotation defining-relation err = %.3e, orth = %.3e, hom = %.3e\n",
                worst_rel, worst_orth, worst_hom);
  }
  // 3) Euler round trip.
  {
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      RotationPoint g = rng.rotation_point();
      Mat3 m = g.matrix();
      Mat3 m2 = RotationPoint::from_matrix(m).matrix();
      worst = std::max(worst, (m - m2).cwiseAbs().maxCoeff());
    }
    RotationPoint id{0, 0, 0};
    Mat3 mi = RotationPoint::from_matrix(id.matrix()).matrix();
    worst = std::max(worst, (mi - Mat3::Identity()).cwiseAbs().maxCoeff());
    RotationPoint flip{0.3, pi, 0};
    Mat3 mf = RotationPoint::from_matrix(flip.matrix()).matrix();
    worst = std::max(worst, (mf - flip.matrix()).cwiseAbs().maxCoeff());
    std::printf("euler round-trip worst err = %.3e\n", worst);
  }
  // 4) Wigner high degree sanity: orthogonality at k = 128.
  {
    RotationPoint g = rng.rotation_point();
    auto d = sh_rotation_matrices(128, g.matrix());
    Eigen::MatrixXd e = d[128] * d[128].transpose() -
                        Eigen::MatrixXd::Identity(257, 257);
    std::printf("k=128 orthogonality err = %.3e\n", e.cwiseAbs().maxCoeff());
  }
  return 0;
}
