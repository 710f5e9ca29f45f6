#pragma once

// Parameter recovery and membership verdicts.

#include <optional>
#include <string>
#include <vector>

#include "factor.hpp"
#include "network.hpp"

namespace ratnet {

enum class Stage { None, FactorTest, SpanTest, DegreeTest, RepeatedFactors, VerificationFail, ResultantTest };

const char* to_string(Stage s);

struct MembershipVerdict {
    bool in_model = false;
    Stage stage_failed = Stage::None;
    std::optional<Weights<cplx>> weights;
    double residual = 0.0;
    /// The test applied is a necessary condition only.
    bool necessary_only = false;
    std::string detail;
};

struct ReconstructOptions {
    double tol = 1e-6;
    /// Additionally require a real factorisation of the denominator.
    bool real_only = false;
    FactorOptions factor;
};

/// Scale so that the anchor coefficient of the denominator is 1. The anchor
/// is the leading graded-lex monomial of `reference`'s denominator, or its
/// largest-magnitude coefficient when the leading one is (numerically) zero.
RationalTuple<cplx> projective_normalize(const RationalTuple<cplx>& t, const RationalTuple<cplx>& reference);

/// Max coefficient difference after normalising both tuples on the anchor of
/// `reference`, relative to the largest normalised reference coefficient.
double projective_mismatch(const RationalTuple<cplx>& t, const RationalTuple<cplx>& reference);

/// One hidden layer (n, m, k): factor Q into m linear forms, then write every
/// P_i in the span of the products of all but one form.
MembershipVerdict reconstruct_shallow(const std::vector<HomPoly<cplx>>& Ps, const HomPoly<cplx>& Q,
                                      const Architecture& arch, const ReconstructOptions& opt = {});

/// Binary architecture (2, ..., 2, 1) with L layers, by induction on L.
MembershipVerdict reconstruct_binary(const HomPoly<cplx>& P, const HomPoly<cplx>& Q, std::size_t L,
                                     const ReconstructOptions& opt = {});

/// Pairwise resultant screen for binary architectures (2, ..., 2, k): every
/// pair of numerators must share a common factor when L >= 3.
MembershipVerdict membership_binary_multioutput(const std::vector<HomPoly<cplx>>& Ps, const HomPoly<cplx>& Q,
                                                std::size_t L, double tol = 1e-8);

/// Psi, reconstruct, Psi again; returns the projective mismatch. Supports one
/// hidden layer and binary single-output architectures.
double round_trip_residual(const Weights<cplx>& w, const ReconstructOptions& opt = {});

}  // namespace ratnet
