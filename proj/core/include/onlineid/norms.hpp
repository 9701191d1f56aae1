#pragma once

#include "onlineid/assembly.hpp"
#include "onlineid/hermite.hpp"
#include "onlineid/window.hpp"

namespace onlineid::fem {

/// Norms of the estimator's function spaces.
///
///   X      L2(Omega)
///   Q      H1(Omega): sqrt(|v|^2 + |v'|^2), the parameter space
///   Z      L2(omega), the observation space
///   Vtil   |(D v')'|_{L2(omega)} + |R v|_X
///   Vhat   |(D v')'|_{L2(Omega\omega)} + |P v|_X
///   VXtil  sqrt(| sqrt|D| v' |^2_{L2(omega)} + |R v|_X^2)
///   VXhat  same on Omega \ omega
///
/// The windowed norms measure R v (resp. P v), so they vanish on fields
/// that vanish where they look.
enum class NormKind { X, Q, Z, Vtil, Vhat, VXtil, VXhat };

const char* to_string(NormKind kind) noexcept;

/// Throws ContractError when a windowed norm is requested without a window.
double norm(const HermiteField& v, NormKind kind,
            const obs::ObservationWindow* window = nullptr,
            const Diffusion& d = Diffusion{});

/// L2 inner product over a region.
double inner_product(const HermiteField& v, const HermiteField& w,
                     const obs::ObservationWindow* window = nullptr,
                     Region region = Region::Domain);

/// Largest |v(x)| over dense sampling (8 points per element plus nodes).
double max_abs(const HermiteField& v);

}  // namespace onlineid::fem

namespace onlineid::fem {

/// sqrt(int_region v^2): |R v|_X for Observed, |P v|_X for Unobserved.
double region_l2(const HermiteField& v, const obs::ObservationWindow& window,
                 Region region);

}  // namespace onlineid::fem
