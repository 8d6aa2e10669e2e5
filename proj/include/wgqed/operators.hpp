#pragma once

// Qubit operators on the 2^N emitter space and product states.
//
// Basis ordering is little-endian: basis index b = sum_i q_i 2^(i-1), so
// site 1 is the least significant bit. Each site uses (|0>, |1>) with
// sigma^- = |0><1|.

#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "wgqed/config.hpp"

namespace wgqed {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<cplx>;

inline constexpr int kMaxDenseSites = 14;

struct EmitterOperator {
  int site = 1;  ///< 1-based
  int n_sites = 1;
  SpMat data;

  Mat dense() const { return Mat(data); }
  Eigen::Index dim() const { return data.rows(); }
};

using EmitterState = Vec;

/// Embedded sigma^-_site on n sites; 2^(n-1) unit entries.
EmitterOperator lowering_operator(int site, int n);

/// 2 op^dagger op - 1 for an arbitrary (possibly evolved) operator matrix.
Mat z_from_lowering(const Mat& op);

/// Site symbols: '0', '1', '+', '-' (the Unicode minus is accepted too).
/// Symbol i of the string describes site i+1.
EmitterState build_product_state(std::string_view spec, int n);

/// Declared one symbol per site, after Unicode normalisation.
std::vector<char> parse_site_symbols(std::string_view spec);

/// <psi| op |psi>.
cplx expectation(const Mat& op, const EmitterState& psi);
cplx expectation(const SpMat& op, const EmitterState& psi);

/// <psi| a^dagger b |psi> = (a psi)^dagger (b psi); the normal-ordered pair
/// reduction used for every qubit observable.
cplx normal_ordered_pair(const Mat& a, const Mat& b, const EmitterState& psi);

/// Second moments <s^dagger_m s_n>(0) of a product state, the input of the
/// linear-emitter population formula (exact for qubit product states).
Eigen::MatrixXcd product_state_moments(std::string_view spec, int n);

/// Total excitation sum_l sigma^+_l sigma^-_l as a diagonal.
Eigen::VectorXd number_diagonal(int n);

}  // namespace wgqed
