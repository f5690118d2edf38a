#pragma once

#include "sopkit/trees.hpp"

#include <stdexcept>

namespace sopkit {

class TransformError : public std::runtime_error {
public:
    enum class Kind { NotInXi, Budget, NotIndiscernible, TooShallow, Internal };
    TransformError(Kind kind, const std::string &message) : std::runtime_error(message), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// p_ν = {θ(x, a_η̄) : η̄ a chain of n+1 initial segments of ν}.
PartialType branch_type(const TemplatePtr &theta, const WitnessFamily &wf, const Node &nu);

struct EmbeddingOptions {
    int m = 2;
    int embed_depth = -1;  // h maps into 2^{<=E}; -1 means n + 2
    int branch_depth = -1; // ν*_η has this length; -1 means E + 1
};

/// A member (h, Υ) of Ξ with the branches that make it inconsistent, plus the
/// quantities derived from it.
struct EmbeddingCertificate {
    int n = 0, m = 0, embed_depth = 0, branch_depth = 0;
    std::vector<std::vector<int>> domain; // ^{<=n}m in breadth-first order
    std::vector<Node> h;                  // h(domain[i])
    std::vector<std::vector<int>> upsilon;
    std::vector<Node> branches; // ν*_η for η in Υ, same order
    int eta0 = 0, eta1 = 1;     // positions in upsilon of the pair with the longest meet
    int k_star = 0, l_star = 0;
    std::size_t scanned = 0; // distinct branch choices examined

    nlohmann::json to_json() const;
};

/// Smallest |Υ| over h, Υ and branch extensions, first in canonical order.
EmbeddingCertificate find_min_embedding(const TheoryPlugin &T, const TemplatePtr &theta, const WitnessFamily &wf,
                                        const EmbeddingOptions &opt, Budget &budget);

/// ς: a node η of length > k* below ν*_{η_j}↾ℓ* goes to ν_ρ↾(|ν_ρ| − (ℓ* − |η|));
/// shorter nodes stay put.
Node varsigma(const Node &eta, int k_star, int l_star, const Node &nu_rho);

/// ν_ρ: ν_⟨⟩ = ν*, ν_{ρ⌢j} = ν_ρ⌢(ν*_{η_j}↾[k*, ℓ*)).
Node nu_of(const EmbeddingCertificate &cert, const Node &rho);

struct TransformResult {
    int k = 0;
    int depth = 0;
    TemplatePtr theta_k;
    TreeFamily family;
    EmbeddingCertificate certificate;
    std::vector<Chain> fixed_chains;               // from Υ* \ {η0, η1}
    std::map<std::string, std::vector<Chain>> conjuncts; // per output node
    Report verification;

    nlohmann::json to_json() const;
};

/// From an SOP''_2 witness for θ to an SOP_2 witness for θ^<k> on 2^{<=d}.
/// Output node ρ uses ν_{⟨0⟩⌢ρ}, so that every node sits strictly below the root.
/// Throws TransformError when no member of Ξ exists within the search bounds.
TransformResult transform_sop2pp_to_sop2(const TheoryPlugin &T, const TemplatePtr &theta, const WitnessFamily &wf,
                                         const EmbeddingOptions &opt, int d, Budget &budget);

/// The easy direction: a_⟨η0, η1⟩ = a_η1 turns an SOP_2 family into an SOP''_2
/// witness with n = 1.
WitnessFamily sop2_implies_sop2pp(const TreeFamily &family);

} // namespace sopkit
