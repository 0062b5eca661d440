#pragma once

#include <optional>
#include <string_view>

#include "lossypdc/core/types.hpp"

namespace lossypdc::decomp {

enum class Basis { kMercerWolf, kWilliamsonEuler, kMaxSqueezed, kCustom };

std::string_view basis_label(Basis basis);  // "MW", "WE", "MSq", "custom"
std::optional<Basis> parse_basis(std::string_view label);

struct ModePair {
  BroadbandMode signal;
  BroadbandMode idler;
  Basis label = Basis::kCustom;
  // False when the source state carries no squeezing (modes are then a
  // deterministic placeholder).
  bool squeezed = true;
  // Set when the defining eigenvalue was degenerate and a tie-break was used.
  bool degenerate = false;
};

// Sigma = O_l Lambda O_r D O_r^T Lambda O_l^T.
struct WilliamsonEulerResult {
  RMatrix o_left;
  RMatrix o_right;
  RVector symplectic_diag;  // (nu_1, nu_1, nu_2, nu_2, ...)
  RVector squeeze_diag;     // (e^{r_1}, e^{-r_1}, ...), r_k descending
  RVector squeezing;        // r_k, descending

  RMatrix symplectic() const;  // S = O_l Lambda O_r
  RMatrix reconstruct() const;
};

// Dominant eigenvectors of <a^dag a> and <b^dag b> with the common phase that
// makes <A B> real and non-negative.
ModePair mercer_wolf_modes(const CorrelationState& state);

// Throws InvalidInput when sigma is not positive definite or has a
// symplectic eigenvalue below 1 - 1e-6.
WilliamsonEulerResult williamson_euler(const CovarianceMatrix& sigma);

ModePair williamson_euler_modes(const CorrelationState& state);

// Eigenvector of Sigma's smallest eigenvalue, split into signal and idler
// parts.
ModePair msq_modes(const CorrelationState& state);

// Reads (x^a_1, y^a_1, ...; x^b_1, y^b_1, ...) as [v^c]_n = y^c_n + i x^c_n and
// normalizes each partition. Throws PartitionDegeneracyError when one part
// carries (numerically) no weight.
ModePair unpack_joint_mode(const RVector& v, std::size_t modes_per_part, Basis label);

ModePair modes_for(Basis basis, const CorrelationState& state);

}  // namespace lossypdc::decomp
