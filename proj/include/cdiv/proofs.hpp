#pragma once

#include <cdiv/identity.hpp>

#include <set>

namespace cdiv {

enum class ProofMechanism : std::uint8_t {
    Succinct = 1,  // zkVM-style receipt, simulated by a hash binding
    Attested = 2,  // TEE-style signed report, simulated by an Ed25519 signature
};

std::string_view to_string(ProofMechanism mechanism);
ProofMechanism parse_mechanism(std::string_view name);

/// Node signing identity. The address is the last 20 bytes of SHA-256(public).
class NodeKey {
  public:
    /// Deterministic key from a 32-byte seed.
    static NodeKey from_seed(const Digest& seed);

    [[nodiscard]] const PublicKey& public_key() const noexcept { return public_; }
    [[nodiscard]] const Address& address() const noexcept { return address_; }

    [[nodiscard]] std::array<std::uint8_t, 64> sign(std::span<const std::uint8_t> message) const;

    bool operator==(const NodeKey&) const = default;

  private:
    NodeKey() = default;

    std::array<std::uint8_t, 64> secret_{};
    PublicKey public_{};
    Address address_{};
};

Address address_of(const PublicKey& key);

struct ExecutionProof {
    ProofMechanism mechanism = ProofMechanism::Attested;
    Digest commitment_digest{};
    std::uint64_t block_number = 0;
    Address submitter{};
    Bytes binding;

    bool operator==(const ExecutionProof&) const = default;
};

/// mechanism(1) || digest(32) || block(8, big-endian) || submitter(20) || binding
Bytes encode(const ExecutionProof& proof);
ExecutionProof decode_proof(std::span<const std::uint8_t> bytes);

/// Bytes covered by the binding: digest || block (big-endian) || submitter.
Bytes binding_message(const Digest& digest, std::uint64_t block_number, const Address& submitter);

struct CostModel {
    double proving_time_s = 0;
    double regular_time_s = 0;
    // Factor as printed in the measurement table; not always proving/regular.
    double printed_overhead_factor = 0;
    double cpu_avg_pct = 0;
    double cpu_max_pct = 0;
    double mem_avg_mb = 0;
    double mem_max_mb = 0;
    std::uint64_t verify_gas_min = 0;
    std::uint64_t verify_gas_avg = 0;
    std::uint64_t verify_gas_max = 0;

    [[nodiscard]] double measured_overhead() const { return proving_time_s / regular_time_s; }
};

/// Measured proving and verification costs: zkVM on F1 (Succinct), SGX on F2 (Attested).
CostModel default_cost_model(ProofMechanism mechanism);

ExecutionProof generate_proof(ProofMechanism mechanism, const CodeIdentity& identity, std::uint64_t block_number,
                              const NodeKey& key);

class ProofError : public Error {
  public:
    enum class Kind { Malformed, UnknownCommitment, InvalidBinding, UntrustedAttester };

    ProofError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    [[nodiscard]] Kind kind() const noexcept { return kind_; }

  private:
    Kind kind_;
};

std::string_view to_string(ProofError::Kind kind);

using TrustedKeys = std::set<PublicKey>;

/// Returns the proven commitment digest or throws ProofError.
Digest verify_proof(const CommitmentRegistry& registry, const TrustedKeys& trusted_keys, const ExecutionProof& proof);

}  // namespace cdiv
