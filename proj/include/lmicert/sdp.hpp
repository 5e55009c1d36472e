#ifndef LMICERT__SDP_HPP_
#define LMICERT__SDP_HPP_

/**
 * @file
 * @brief Dense block semidefinite programs and a homogeneous self-dual interior point solver.
 *
 * Problems are stored in primal standard form
 * \f[
 *   \min / \max \; \sum_k \langle C_k, X_k \rangle + c_0 \quad
 *   \text{s.t.}\; \sum_k \langle A_{ik}, X_k \rangle = b_i,\; X_k \succeq 0,
 * \f]
 * with the dual \f$ \max b^T y \; \text{s.t.}\; C - \sum_i y_i A_i = Z \succeq 0 \f$ (min sense).
 */

#include "lmicert/scalar.hpp"

#include <Eigen/Sparse>

#include <string>
#include <vector>

namespace lmicert {

using SparseSym = Eigen::SparseMatrix<double>;

struct SdpConstraint
{
  /// (block index, symmetric coefficient matrix); blocks not listed contribute zero.
  std::vector<std::pair<int, SparseSym>> terms;
  double rhs = 0;
  std::string label;
};

enum class Sense { Minimize, Maximize };

struct SdpProblem
{
  std::vector<int> block_sizes;
  std::vector<std::string> block_labels;
  std::vector<SdpConstraint> constraints;
  /// Cost matrix per block (same length as block_sizes; empty matrix means zero).
  std::vector<SparseSym> objective;
  double objective_constant = 0;
  Sense sense               = Sense::Minimize;

  /// Appends a PSD block (size 1 is a nonnegative scalar) and returns its index.
  int add_block(int size, std::string label = {});
  int num_blocks() const { return static_cast<int>(block_sizes.size()); }
  int num_constraints() const { return static_cast<int>(constraints.size()); }
  /// Throws std::invalid_argument on size mismatches or asymmetric data.
  void validate() const;
};

enum class SdpStatus { Optimal, PrimalInfeasible, DualInfeasible, Inaccurate, IterationLimit };

const char * to_string(SdpStatus s);

struct SdpSettings
{
  double tol          = 1e-8;  ///< residual and relative gap tolerance
  int max_iters       = 200;
  double infeas_ratio = 1e6;   ///< kappa/tau needed before declaring infeasibility
  double regularization = 1e-13;
  double step_fraction  = 0.99;
  bool verbose          = false;
};

struct SdpSolution
{
  SdpStatus status = SdpStatus::Inaccurate;
  std::vector<Mat<double>> primal;      ///< X blocks
  Vec<double> dual;                     ///< multipliers y
  std::vector<Mat<double>> dual_slack;  ///< Z = C - sum y_i A_i (min sense)
  double objective_value = 0;           ///< primal objective incl. constant, in the problem's sense
  double dual_objective  = 0;
  double primal_residual = 0;  ///< relative ||A(X) - b||
  double dual_residual   = 0;  ///< relative ||C - A^*(y) - Z||
  double gap             = 0;  ///< relative duality gap
  double kappa_over_tau  = 0;
  int iterations         = 0;

  /// PrimalInfeasible: y with b^T y = 1 and -sum y_i A_i PSD.
  Vec<double> farkas_dual;
  /// DualInfeasible: X PSD with A(X) = 0 and an improving objective (-1 after normalization).
  std::vector<Mat<double>> farkas_primal;
  double ray_residual = 0;
};

SdpSolution solve(const SdpProblem & problem, const SdpSettings & settings = {});

/// max_i |<A_i, X> - b_i| for a candidate primal point (independent of the solver).
double primal_infeasibility(const SdpProblem & problem, const std::vector<Mat<double>> & x);

/// <C, X> + c0 in the problem's sense.
double primal_objective(const SdpProblem & problem, const std::vector<Mat<double>> & x);

/**
 * @brief W with U ~= W^T W, one row per eigenvalue above @p tol.
 *
 * Throws std::domain_error when the smallest eigenvalue is below -tol.
 */
Mat<double> psd_factor(const Mat<double> & u, double tol);

}  // namespace lmicert

#endif  // LMICERT__SDP_HPP_
