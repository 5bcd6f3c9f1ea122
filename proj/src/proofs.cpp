#include <cdiv/proofs.hpp>

#include "sodium_init.hpp"

#include <sodium.h>

#include <algorithm>

namespace cdiv {

namespace {

constexpr std::string_view kSuccinctDomainTag = "cdiv/succinct-receipt/v1";
constexpr std::size_t kHeaderSize = 1 + 32 + 8 + 20;
constexpr std::size_t kAttestedBindingSize = crypto_sign_PUBLICKEYBYTES + crypto_sign_BYTES;

void put_u64_be(Bytes& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

Digest succinct_binding(const Digest& digest, std::uint64_t block_number, const Address& submitter) {
    Bytes msg = binding_message(digest, block_number, submitter);
    msg.insert(msg.end(), kSuccinctDomainTag.begin(), kSuccinctDomainTag.end());
    return sha256(msg);
}

}  // namespace

std::string_view to_string(ProofMechanism mechanism) {
    switch (mechanism) {
        case ProofMechanism::Succinct: return "succinct";
        case ProofMechanism::Attested: return "attested";
    }
    return "unknown";
}

ProofMechanism parse_mechanism(std::string_view name) {
    if (name == "succinct" || name == "zkvm") return ProofMechanism::Succinct;
    if (name == "attested" || name == "tee") return ProofMechanism::Attested;
    throw Error("unknown proof mechanism '" + std::string(name) + "'");
}

std::string_view to_string(ProofError::Kind kind) {
    switch (kind) {
        case ProofError::Kind::Malformed: return "malformed";
        case ProofError::Kind::UnknownCommitment: return "unknown_commitment";
        case ProofError::Kind::InvalidBinding: return "invalid_binding";
        case ProofError::Kind::UntrustedAttester: return "untrusted_attester";
    }
    return "unknown";
}

Address address_of(const PublicKey& key) {
    const Digest h = sha256(key);
    Address addr{};
    std::copy(h.end() - addr.size(), h.end(), addr.begin());
    return addr;
}

NodeKey NodeKey::from_seed(const Digest& seed) {
    detail::ensure_sodium();
    NodeKey key;
    crypto_sign_seed_keypair(key.public_.data(), key.secret_.data(), seed.data());
    key.address_ = address_of(key.public_);
    return key;
}

std::array<std::uint8_t, 64> NodeKey::sign(std::span<const std::uint8_t> message) const {
    std::array<std::uint8_t, 64> sig{};
    crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), secret_.data());
    return sig;
}

Bytes binding_message(const Digest& digest, std::uint64_t block_number, const Address& submitter) {
    Bytes msg;
    msg.reserve(digest.size() + 8 + submitter.size());
    msg.insert(msg.end(), digest.begin(), digest.end());
    put_u64_be(msg, block_number);
    msg.insert(msg.end(), submitter.begin(), submitter.end());
    return msg;
}

Bytes encode(const ExecutionProof& proof) {
    Bytes out;
    out.reserve(kHeaderSize + proof.binding.size());
    out.push_back(static_cast<std::uint8_t>(proof.mechanism));
    out.insert(out.end(), proof.commitment_digest.begin(), proof.commitment_digest.end());
    put_u64_be(out, proof.block_number);
    out.insert(out.end(), proof.submitter.begin(), proof.submitter.end());
    out.insert(out.end(), proof.binding.begin(), proof.binding.end());
    return out;
}

ExecutionProof decode_proof(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderSize) {
        throw ProofError(ProofError::Kind::Malformed, "proof encoding shorter than its fixed header");
    }
    ExecutionProof proof;
    const std::uint8_t tag = bytes[0];
    if (tag != static_cast<std::uint8_t>(ProofMechanism::Succinct) &&
        tag != static_cast<std::uint8_t>(ProofMechanism::Attested)) {
        throw ProofError(ProofError::Kind::Malformed, "unknown mechanism tag " + std::to_string(tag));
    }
    proof.mechanism = static_cast<ProofMechanism>(tag);
    auto it = bytes.begin() + 1;
    std::copy_n(it, 32, proof.commitment_digest.begin());
    it += 32;
    for (int i = 0; i < 8; ++i, ++it) proof.block_number = (proof.block_number << 8) | *it;
    std::copy_n(it, 20, proof.submitter.begin());
    it += 20;
    proof.binding.assign(it, bytes.end());
    return proof;
}

CostModel default_cost_model(ProofMechanism mechanism) {
    switch (mechanism) {
        case ProofMechanism::Succinct:
            return CostModel{
                .proving_time_s = 59.0,
                .regular_time_s = 15.14e-6,
                .printed_overhead_factor = 39333333.0,
                .cpu_avg_pct = 90.05,
                .cpu_max_pct = 100.00,
                .mem_avg_mb = 1331,
                .mem_max_mb = 2150,
                .verify_gas_min = 288458,
                .verify_gas_avg = 289728,
                .verify_gas_max = 291013,
            };
        case ProofMechanism::Attested:
            return CostModel{
                .proving_time_s = 0.080,
                .regular_time_s = 1.42e-3,
                .printed_overhead_factor = 56.0,
                .cpu_avg_pct = 22.24,
                .cpu_max_pct = 23.35,
                .mem_avg_mb = 21,
                .mem_max_mb = 21,
                .verify_gas_min = 5397746,
                .verify_gas_avg = 5397746,
                .verify_gas_max = 5397746,
            };
    }
    throw Error("unknown proof mechanism");
}

ExecutionProof generate_proof(ProofMechanism mechanism, const CodeIdentity& identity, std::uint64_t block_number,
                              const NodeKey& key) {
    ExecutionProof proof{mechanism, identity.digest, block_number, key.address(), {}};
    switch (mechanism) {
        case ProofMechanism::Succinct: {
            const Digest token = succinct_binding(proof.commitment_digest, block_number, proof.submitter);
            proof.binding.assign(token.begin(), token.end());
            break;
        }
        case ProofMechanism::Attested: {
            const auto sig = key.sign(binding_message(proof.commitment_digest, block_number, proof.submitter));
            proof.binding.reserve(kAttestedBindingSize);
            proof.binding.insert(proof.binding.end(), key.public_key().begin(), key.public_key().end());
            proof.binding.insert(proof.binding.end(), sig.begin(), sig.end());
            break;
        }
    }
    return proof;
}

Digest verify_proof(const CommitmentRegistry& registry, const TrustedKeys& trusted_keys, const ExecutionProof& proof) {
    if (!registry.contains(proof.commitment_digest)) {
        throw ProofError(ProofError::Kind::UnknownCommitment,
                         "commitment " + to_hex(proof.commitment_digest) + " is not registered");
    }
    switch (proof.mechanism) {
        case ProofMechanism::Succinct: {
            const Digest expected = succinct_binding(proof.commitment_digest, proof.block_number, proof.submitter);
            if (proof.binding.size() != expected.size() ||
                sodium_memcmp(proof.binding.data(), expected.data(), expected.size()) != 0) {
                throw ProofError(ProofError::Kind::InvalidBinding, "receipt does not bind the claimed fields");
            }
            return proof.commitment_digest;
        }
        case ProofMechanism::Attested: {
            if (proof.binding.size() != kAttestedBindingSize) {
                throw ProofError(ProofError::Kind::InvalidBinding, "attestation has the wrong length");
            }
            PublicKey signer{};
            std::copy_n(proof.binding.begin(), signer.size(), signer.begin());
            if (!trusted_keys.contains(signer)) {
                throw ProofError(ProofError::Kind::UntrustedAttester, "attestation key " + to_hex(signer) +
                                                                          " is not trusted");
            }
            const Bytes msg = binding_message(proof.commitment_digest, proof.block_number, proof.submitter);
            if (crypto_sign_verify_detached(proof.binding.data() + signer.size(), msg.data(), msg.size(),
                                            signer.data()) != 0) {
                throw ProofError(ProofError::Kind::InvalidBinding, "attestation signature does not verify");
            }
            return proof.commitment_digest;
        }
    }
    throw ProofError(ProofError::Kind::Malformed, "unknown mechanism");
}

}  // namespace cdiv
