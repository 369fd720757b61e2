#ifndef EBEM_CORE_HPP
#define EBEM_CORE_HPP

#include <complex>
#include <stdexcept>
#include <Eigen/Dense>

namespace ebem {

using Complex = std::complex<double>;
using CVec2 = Eigen::Vector2cd;
using CMat22 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2d;

inline constexpr Complex iu{0.0, 1.0};

// Rotation by +pi/2; n = -N t maps a CCW tangent to the outward normal.
inline Eigen::Matrix2d rot90()
{
    Eigen::Matrix2d N;
    N << 0.0, -1.0, 1.0, 0.0;
    return N;
}

// Isotropic elastic solid in frequency domain.
struct ElasticMedium {
    double lambda;
    double mu;
    double rho;
    double omega;

    ElasticMedium(double lambda_, double mu_, double rho_, double omega_)
        : lambda(lambda_), mu(mu_), rho(rho_), omega(omega_)
    {
        if (!(mu > 0.0) || !(lambda + mu > 0.0) || !(rho > 0.0) || !(omega > 0.0))
            throw std::invalid_argument("ElasticMedium: require mu>0, lambda+mu>0, rho>0, omega>0");
    }

    double kp() const { return omega * std::sqrt(rho / (lambda + 2.0 * mu)); }
    double ks() const { return omega * std::sqrt(rho / mu); }
};

// (k_p, k_s) of a valid medium.
std::pair<double, double> medium_wavenumbers(const ElasticMedium& m);

// Dense complex (2N)x(2N) matrix addressed as an NxN grid of 2x2 blocks.
class BlockMatrix {
public:
    explicit BlockMatrix(int n_nodes)
        : n_(n_nodes), data_(Eigen::MatrixXcd::Zero(2 * n_nodes, 2 * n_nodes))
    {
        if (n_nodes <= 0) throw std::invalid_argument("BlockMatrix: n_nodes must be positive");
    }

    int n_nodes() const { return n_; }

    void set_block(int i, int j, const CMat22& b) { data_.block<2, 2>(2 * i, 2 * j) = b; }
    void add_block(int i, int j, const CMat22& b) { data_.block<2, 2>(2 * i, 2 * j) += b; }
    CMat22 block(int i, int j) const { return data_.block<2, 2>(2 * i, 2 * j); }

    Eigen::MatrixXcd& matrix() { return data_; }
    const Eigen::MatrixXcd& matrix() const { return data_; }

    bool all_finite() const { return data_.allFinite(); }

private:
    int n_;
    Eigen::MatrixXcd data_;
};

}  // namespace ebem

#endif
