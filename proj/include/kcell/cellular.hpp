#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kcell/certificate.hpp"
#include "kcell/derived.hpp"
#include "kcell/localcoh.hpp"

namespace kcell {

/// Ext degrees a ≤ i ≤ b over which k-equivalences are checked.
struct CellRange {
  int a = -4, b = 4;
};

struct Verification {
  bool passed = false;
  std::string method;             // "ext-of-cone" or "colimit"
  std::string certificate;        // validation message, empty when valid
  NullReport equivalence;         // Ext(k, cone) for ext-of-cone
  RangeReport report;
  std::string detail;
  std::string describe() const;
};

struct CellResult {
  GComplex input, approximation;
  ComplexMap map;                 // approximation -> input
  BuildCertificate certificate;
  Verification verification;
  std::string strategy;
  CellRange range;
  /// π_n of the approximation: 0 → H_{n+1}[1/z]/H_{n+1} → π_n → Γ_I H_n → 0 (cyclic strategy).
  std::vector<PiEntry> homotopy;
  std::vector<std::string> notes;
};

/// Identity on a complex over a p-group with F_p coefficients, certified from k.
CellResult cell_p_group(const GComplex& x, CellRange range = {});

struct KoszulReport {
  std::vector<Triangle> triangles;         // K_n → K_{n+1} → K_1
  bool power_zero = false;                 // (1 − g)^{|P|} = 0
  std::vector<std::size_t> top_homology;   // dims of H_0, H_1 of K_{|P|}
  bool splits = false;                     // kP is a retract of K_{|P|}
  BuildCertificate certificate;            // k builds kP
  std::vector<std::size_t> resolution_ranks;  // kP builds k: free resolution of k
  bool resolution_ok = false;
};
KoszulReport kp_koszul_filtration(const GroupPtr& p, Ring ring, int depth = 3);

/// Fixed points of the p'-part of a nilpotent group.
CellResult cell_nilpotent(const GComplex& x, CellRange range = {});

/// Fiber of X → X[1/z] for a cyclic group, z = 1 − generator.
CellResult cell_cyclic(const GComplex& x, CellRange range = {}, std::optional<int> generator = std::nullopt);

/// Identity when every homology module is I-nilpotent.
CellResult cell_nilpotent_action(const GComplex& x, CellRange range = {});

struct ExtensionDiagnostics {
  std::string item;                            // "a", "b", "c" or "d"
  std::optional<Subgroup> prime_to_p;          // H ⊆ N used for items a and b
  std::vector<HomologyModule> fiber_homology;  // H_n(BN; k) as Q-modules, item c
  std::vector<bool> nilpotent;
  bool pulled_back = false;
  std::string witness;
};
/// Homology of BN with its Q-action, degrees 0..top.
ExtensionDiagnostics extension_diagnostics(const GroupExtension& ext, const GComplex& x, int top);

CellResult cell_extension(const GroupExtension& ext, const GComplex& x, CellRange range = {});

/// k-equivalence check plus certificate validation for a candidate C → X.
Verification verify_cell_approx(const ComplexMap& candidate, const BuildCertificate* certificate, CellRange range = {});
/// Re-checks a result, including colimit results.
Verification verify_cell_result(const CellResult& r);

/// Certificate for a complex through the p-group or nilpotent-action routes; nullopt with a reason otherwise.
std::optional<BuildCertificate> auto_certify(const GComplex& c, std::string* why = nullptr);

/// Complex over G/H from one on which H acts trivially.
GComplex descend(const GComplex& x, const Quotient& q);

/// Strategies in the order p-group, nilpotent, cyclic, nilpotent-action, extension.
const std::vector<std::string>& strategy_names();
CellResult cellular_approximation(const GComplex& x, const std::string& strategy = "auto", CellRange range = {});

}  // namespace kcell
