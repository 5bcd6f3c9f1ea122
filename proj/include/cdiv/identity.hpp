#pragma once

#include <cdiv/types.hpp>

#include <optional>
#include <set>
#include <vector>

namespace cdiv {

/// The code executed by one implementation for one protocol step.
struct CodeSegment {
    ImplId impl_id;
    std::string step_id;
    Bytes code;
};

/// Commitment binding (impl, step) to the SHA-256 of its exact code bytes.
struct CodeIdentity {
    ImplId impl_id;
    std::string step_id;
    Digest digest{};

    auto operator<=>(const CodeIdentity&) const = default;
};

class IdentityError : public Error {
  public:
    enum class Kind { RejectedInput, NonDistinctFingerprint, DuplicateKey, EmptyRegistry, UnknownIdentity };

    IdentityError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    [[nodiscard]] Kind kind() const noexcept { return kind_; }

  private:
    Kind kind_;
};

CodeIdentity compute_commitment(const CodeSegment& segment);

/// Approved commitments, ordered by (impl_id, step_id). Digests and keys are unique.
class CommitmentRegistry {
  public:
    CommitmentRegistry() = default;

    // Throws IdentityError on a duplicate digest or (impl, step) key.
    void add(const CodeIdentity& identity);
    // Returns the removed entry.
    CodeIdentity remove(const ImplId& impl_id, const std::string& step_id);

    [[nodiscard]] const std::vector<CodeIdentity>& entries() const noexcept { return entries_; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }

    [[nodiscard]] const CodeIdentity* find(const Digest& digest) const;
    [[nodiscard]] const CodeIdentity* find(const ImplId& impl_id, const std::string& step_id) const;
    [[nodiscard]] bool contains(const Digest& digest) const { return find(digest) != nullptr; }

    /// Distinct implementation ids in sorted order.
    [[nodiscard]] std::vector<ImplId> impls() const;

    bool operator==(const CommitmentRegistry&) const = default;

  private:
    std::vector<CodeIdentity> entries_;
};

CommitmentRegistry build_registry(const std::vector<CodeSegment>& segments);

}  // namespace cdiv
