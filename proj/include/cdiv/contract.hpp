#pragma once

#include <cdiv/proofs.hpp>

#include <deque>
#include <map>
#include <optional>

namespace cdiv {

class ContractState;
ContractState contract_from_json(std::string_view text);

/// Flat epsilon above the 1/|C| share, linear r_max -> r_min below it.
struct RewardParams {
    RewardUnits epsilon = 0;
    RewardUnits r_min = 0;
    RewardUnits r_max = 0;

    // r_max >= r_min > epsilon >= 0
    [[nodiscard]] bool valid() const noexcept { return r_max >= r_min && r_min > epsilon && epsilon >= 0; }

    bool operator==(const RewardParams&) const = default;
};

/// Piecewise reward for an implementation holding `share` of the distribution among
/// `n_impls` implementations. The interpolated branch rounds half up.
RewardUnits reward(Share share, std::size_t n_impls, const RewardParams& params);

enum class WindowMode { Cumulative, Sliding };

struct WindowConfig {
    WindowMode mode = WindowMode::Sliding;
    std::size_t size = 0;  // W, sliding mode only

    bool operator==(const WindowConfig&) const = default;
};

/// Verified submissions the distribution estimate is computed from.
class DistributionWindow {
  public:
    struct Entry {
        std::uint64_t block = 0;
        Digest digest{};
        bool operator==(const Entry&) const = default;
    };

    explicit DistributionWindow(WindowConfig config = {});

    void record(std::uint64_t block, const Digest& digest);
    // Drops every entry for the digest.
    void purge(const Digest& digest);
    void trim();

    [[nodiscard]] const WindowConfig& config() const noexcept { return config_; }
    [[nodiscard]] const std::map<Digest, std::uint64_t>& counts() const noexcept { return counts_; }
    [[nodiscard]] const std::deque<Entry>& recent() const noexcept { return recent_; }
    [[nodiscard]] std::uint64_t count(const Digest& digest) const;
    [[nodiscard]] std::uint64_t total() const noexcept { return total_; }

    bool operator==(const DistributionWindow&) const = default;

  private:
    friend ContractState contract_from_json(std::string_view text);

    WindowConfig config_;
    std::map<Digest, std::uint64_t> counts_;
    std::deque<Entry> recent_;  // sliding mode only
    std::uint64_t total_ = 0;
};

enum class SubmitReason { Ok, NotExpected, Duplicate, Stale, VerifyFail, InsufficientTreasury };

std::string_view to_string(SubmitReason reason);

struct RewardOutcome {
    bool accepted = false;
    RewardUnits reward = 0;
    Share share_at_submission{};
    SubmitReason reason = SubmitReason::VerifyFail;
    std::optional<ProofError::Kind> verify_error;
};

class ContractError : public Error {
  public:
    enum class Kind { NotOwner, InvalidParams, EmptyRegistry, UnknownVersion };

    ContractError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    [[nodiscard]] Kind kind() const noexcept { return kind_; }

  private:
    Kind kind_;
};

/// Off-chain model of the diversity reward contract. Single writer; copies are cheap
/// enough to snapshot and compare.
class ContractState {
  public:
    ContractState(Address owner, CommitmentRegistry registry, RewardParams params, WindowConfig window,
                  RewardUnits treasury);

    RewardOutcome submit_proof(const ExecutionProof& proof);
    void advance_block();

    /// Implementation with the fewest window entries; ties go to the smallest impl id.
    [[nodiscard]] ImplId get_minority() const;
    [[nodiscard]] std::map<ImplId, double> get_distribution() const;
    [[nodiscard]] std::map<ImplId, std::uint64_t> impl_counts() const;
    [[nodiscard]] Share share_of(const ImplId& impl_id) const;
    [[nodiscard]] std::size_t impl_count() const { return registry_.impls().size(); }

    void owner_set_params(const Address& caller, const RewardParams& params);
    void owner_add_version(const Address& caller, const CodeIdentity& identity);
    // Removing a version purges its window entries.
    void owner_remove_version(const Address& caller, const ImplId& impl_id, const std::string& step_id);
    void owner_add_validator(const Address& caller, const Address& validator);
    void owner_trust_key(const Address& caller, const PublicKey& key);
    void owner_fund(const Address& caller, RewardUnits amount);

    [[nodiscard]] const Address& owner() const noexcept { return owner_; }
    [[nodiscard]] const CommitmentRegistry& registry() const noexcept { return registry_; }
    [[nodiscard]] const RewardParams& params() const noexcept { return params_; }
    [[nodiscard]] const DistributionWindow& window() const noexcept { return window_; }
    [[nodiscard]] RewardUnits treasury() const noexcept { return treasury_; }
    [[nodiscard]] const std::set<Address>& validators() const noexcept { return validators_; }
    [[nodiscard]] const TrustedKeys& trusted_keys() const noexcept { return trusted_keys_; }
    [[nodiscard]] std::uint64_t current_block() const noexcept { return current_block_; }
    [[nodiscard]] const std::set<Address>& submitted_this_block() const noexcept { return submitted_this_block_; }

    bool operator==(const ContractState&) const = default;

  private:
    friend ContractState contract_from_json(std::string_view text);

    void require_owner(const Address& caller) const;

    Address owner_{};
    CommitmentRegistry registry_;
    RewardParams params_;
    DistributionWindow window_;
    RewardUnits treasury_ = 0;
    std::set<Address> validators_;
    TrustedKeys trusted_keys_;
    std::uint64_t current_block_ = 0;
    std::set<Address> submitted_this_block_;
};

/// Canonical snapshot: sorted keys, no insignificant whitespace.
std::string contract_to_json(const ContractState& state);
ContractState contract_from_json(std::string_view text);

}  // namespace cdiv
