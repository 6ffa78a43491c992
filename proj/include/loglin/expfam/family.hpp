#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "loglin/types.hpp"

namespace loglin::expfam {

enum class Family {
    gaussian,        // T(x) = (x, x x^T)
    inverse_wishart, // T(X) = (log|X|, X^-1)
    gamma,           // T(x) = (log x, x)
    inverse_gamma,   // T(x) = (log x, 1/x)
    quad_trig,       // T(x) = (x^2, x, cos x, sin x)
};

std::string_view family_name(Family f);

enum class BlockKind { scalar, vector, sym_matrix };

/// One labelled entry of a natural parameter or likelihood offset. Scalars are
/// stored as 1x1, vectors as dx1. Symmetric matrices are symmetrized on write;
/// asymmetry beyond linalg::kAsymmetryTol relative is rejected.
struct Block {
    std::string label;
    BlockKind kind;
    MatX value;

    static Block scalar(std::string label, double v);
    static Block vector(std::string label, const VecX& v);
    static Block sym_matrix(std::string label, const MatX& m);

    double as_scalar() const;
    bool same_schema(const Block& other) const;
};

/// Natural parameter eta of an exponential-family density, laid out block by
/// block in the family's sufficient-statistic order.
struct NaturalParam {
    Family family;
    std::vector<Block> blocks;
};

/// The lambda(Y) term a conjugate likelihood adds to the prior's natural
/// parameter. Shares the block layout of the target family's NaturalParam.
struct LikelihoodOffset {
    Family family;
    std::vector<Block> blocks;
};

bool same_schema(const NaturalParam& eta, const LikelihoodOffset& lambda);

/// Throws posterior_improper unless eta lies in the family's natural parameter
/// space (the set where the log-partition integral is finite).
void require_in_natural_space(const NaturalParam& eta);

/// Blockwise eta + lambda with a hard schema check. The sum is validated
/// against the family's natural parameter space before being returned.
NaturalParam conjugate_update(const NaturalParam& eta, const LikelihoodOffset& lambda);

/// Blockwise lambda1 + lambda2 (offsets compose additively).
LikelihoodOffset add_offsets(const LikelihoodOffset& a, const LikelihoodOffset& b);

// ---------------------------------------------------------------------------
// Distribution registry: sufficient statistics and known conjugate likelihoods
// for the common continuous exponential families. Only the Gaussian,
// gamma/inverse-gamma and inverse-Wishart entries are backed by full
// implementations; the rest are reference metadata.
// ---------------------------------------------------------------------------

struct DistributionInfo {
    std::string_view name;
    std::string_view sufficient_stat;
    std::vector<std::string_view> conjugate_likelihoods;
    bool implemented;
};

const std::vector<DistributionInfo>& distribution_registry();
const DistributionInfo* registry_lookup(std::string_view name);

} // namespace loglin::expfam
