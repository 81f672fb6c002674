#pragma once

#include <optional>
#include <span>
#include <string>

#include "csalsa/types.hpp"

namespace csalsa {

/// Dual field (p_x, p_y) of the TV prox, kept between calls when warm
/// starting.
struct TvDualField {
    CVec px;
    CVec py;
};

struct TvSettings {
    /// Fixed number of Chambolle iterations per prox evaluation.
    int inner_iterations = 5;
    /// Dual step; Chambolle's convergence analysis covers <= 1/8, 0.248 is the
    /// customary practical value.
    double dual_step = 0.248;
    /// Reuse the previous dual field as the starting point instead of zero.
    bool warm_start = false;
};

/// Regularizer phi together with its Moreau proximal map.
class Regularizer {
public:
    enum class Kind { L1, IsotropicTV };

    static Regularizer l1();
    static Regularizer isotropic_tv(TvSettings settings = {});

    Kind kind() const { return kind_; }
    const TvSettings& tv_settings() const { return tv_; }
    std::string name() const;

    /// phi(x). TV needs the image shape.
    double evaluate(std::span<const cplx> x, std::optional<Shape> shape = std::nullopt) const;

    /// Psi_{tau phi}(v) = argmin_x 1/2 ||x - v||^2 + tau phi(x). For TV the
    /// dual field is read from / written to `dual` when warm starting is on.
    CVec prox(std::span<const cplx> v, double tau, std::optional<Shape> shape = std::nullopt,
              TvDualField* dual = nullptr) const;

private:
    Kind kind_ = Kind::L1;
    TvSettings tv_;
};

struct BallConstraint {
    Observation center;
    double radius = 0.0;
};

/// Component-wise y -> sign(y) max(|y| - tau, 0); for complex entries the
/// modulus is shrunk and the phase kept.
RVec soft_threshold(std::span<const double> v, double tau);
CVec soft_threshold(std::span<const cplx> v, double tau);

double l1_norm(std::span<const cplx> x);

/// Isotropic TV: sum over pixels of sqrt(|dx|^2 + |dy|^2) with forward
/// differences and replicate edges (the difference leaving the grid is 0).
double tv_norm(const ImageGrid& x);
double tv_norm(std::span<const cplx> x, Shape shape);

/// Chambolle's dual projection iteration for
///   argmin_x 1/2 ||x - v||^2 + tau TV(x),
/// run for exactly `settings.inner_iterations` steps from a zero dual field
/// (or from `dual` when warm starting).
ImageGrid tv_prox(const ImageGrid& v, double tau, const TvSettings& settings);
CVec tv_prox(std::span<const cplx> v, Shape shape, double tau, const TvSettings& settings,
             TvDualField* dual = nullptr);

/// Orthogonal projection onto {x : ||x - center|| <= radius}.
Observation project_ball(std::span<const cplx> s, const BallConstraint& ball);

}  // namespace csalsa
