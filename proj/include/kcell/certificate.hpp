#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kcell/complex.hpp"

namespace kcell {

/// Degreewise equality of presentations: same ranks, relation lattices,
/// actions and differentials modulo relations.
bool same_complex(const GComplex& a, const GComplex& b);

enum class StepKind {
  Zero,
  Base,                // Σ^s k
  Sum,                 // ⊕ Σ^{s_j} (earlier object j)
  Triangle,            // one vertex of a validated triangle whose other two are built
  Retract,             // r ∘ i = id into an earlier object
  Equivalence,         // quasi-isomorphic to an earlier object
  ColimitStage,        // stage of a telescope, with the map from the previous stage
  ModuleOverQuotient,  // restriction along G → Q of an object certified over Q
};

const char* step_kind_name(StepKind kind);

struct StepRef {
  std::size_t id = 0;
  int shift = 0;
};

class BuildCertificate;

struct BuildStep {
  StepKind kind = StepKind::Zero;
  std::string note;
  GComplex object;
  std::vector<StepRef> refs;
  int shift = 0;                       // Base
  std::optional<Triangle> triangle;    // Triangle
  int vertex = 2;                      // 0 = A, 1 = B, 2 = C; refs hold the other two in order
  std::optional<ComplexMap> map;       // Retract: i (object -> ref); Equivalence: quasi-iso; ColimitStage: previous -> this
  std::optional<ComplexMap> retraction;  // Retract: r (ref -> object)
  int stage = 0;                       // ColimitStage
  std::shared_ptr<const BuildCertificate> sub;  // ModuleOverQuotient
  std::optional<GroupHom> along;       // ModuleOverQuotient
};

/// Finite recipe building objects from k by shifts, sums, triangles, retracts
/// and equivalences. Steps only reference earlier steps.
class BuildCertificate {
 public:
  BuildCertificate() = default;
  BuildCertificate(GroupPtr g, Ring ring);

  const GroupPtr& group() const { return group_; }
  Ring ring() const { return ring_; }
  std::size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }
  const BuildStep& step(std::size_t id) const { return steps_[id]; }
  const std::vector<BuildStep>& steps() const { return steps_; }
  /// The last step is the certified object.
  const GComplex& result() const;
  /// True when the result is the stage of a telescope rather than the colimit itself.
  bool colimit() const { return colimit_; }
  void mark_colimit() { colimit_ = true; }

  std::size_t zero();
  std::size_t base(int shift);
  std::size_t sum(const std::vector<StepRef>& refs, std::string note = "");
  std::size_t triangle(const Triangle& t, int vertex, StepRef first, StepRef second, std::string note = "");
  std::size_t retract(StepRef of, const ComplexMap& i, const ComplexMap& r, std::string note = "");
  /// f between the object of `ref` and a new object (either direction).
  std::size_t equivalence(StepRef ref, const ComplexMap& f, std::string note = "");
  std::size_t colimit_stage(StepRef stage_object, std::optional<std::size_t> previous, const ComplexMap& from_previous,
                            int stage, std::string note = "");
  std::size_t over_quotient(std::shared_ptr<const BuildCertificate> sub, const GroupHom& along, std::string note = "");

  /// Object of a reference (shifted).
  GComplex object(StepRef ref) const;

  /// Re-checks every step; empty string when valid.
  std::string validate() const;
  /// validate() plus: the result has the same presentation as c.
  std::string validate_against(const GComplex& c) const;
  std::vector<std::string> summary() const;

 private:
  std::size_t push(BuildStep s);
  std::string check_step(std::size_t id) const;

  GroupPtr group_;
  Ring ring_{};
  std::vector<BuildStep> steps_;
  bool colimit_ = false;
};

/// Incremental construction of certificates with caching of repeated pieces.
class CertificateBuilder {
 public:
  CertificateBuilder(GroupPtr g, Ring ring) : cert_(std::move(g), ring) {}

  BuildCertificate& certificate() { return cert_; }
  BuildCertificate take() { return std::move(cert_); }

  std::size_t zero();
  std::size_t base(int shift);
  /// Module with trivial action, as a sum of k and cones k --d--> k.
  std::size_t trivial_module(const GModule& m, int shift);
  /// I-nilpotent module, through the filtration I^j M + R with trivial subquotients.
  std::size_t nilpotent_module(const GModule& m, int shift);
  /// kP for cyclic P = group() over F_p, through K_n = cone((1−g)^n) and the retract kP ⊂ K_{|P|}.
  std::size_t regular_from_koszul();
  /// kP^r placed in degree shift, using regular_from_koszul().
  std::size_t free_module(std::size_t r, int shift);

  using ModuleBuilder = std::function<std::size_t(CertificateBuilder&, const GModule&, int)>;
  /// X from its modules X_n via the brutal filtration.
  std::size_t complex_by_modules(const GComplex& x, const ModuleBuilder& build);
  /// X from its homology modules via the Postnikov filtration τ_{≥n} X.
  std::size_t complex_by_homology(const GComplex& x, const ModuleBuilder& build);

  /// Adds an equivalence step when the object of `id` is not literally `target`.
  std::size_t match(std::size_t id, const GComplex& target, const ComplexMap& f);

 private:
  BuildCertificate cert_;
  std::optional<std::size_t> zero_id_;
  std::map<int, std::size_t> base_ids_;
  std::map<std::pair<std::string, int>, std::size_t> cyclic_ids_;
  std::optional<std::size_t> regular_id_;
};

/// True when m is literally kG^r in the standard basis.
bool is_free_module(const GModule& m);

}  // namespace kcell
