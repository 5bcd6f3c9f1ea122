#include <cdiv/contract.hpp>

#include <algorithm>
#include <limits>

namespace cdiv {

RewardUnits reward(Share share, std::size_t n_impls, const RewardParams& params) {
    if (n_impls == 0) throw Error("reward needs at least one implementation");
    if (share.total != 0 && share.count > share.total) throw Error("share exceeds 1");
    using Wide = __int128;
    const Wide count = share.total == 0 ? 0 : share.count;
    const Wide total = share.total == 0 ? 1 : share.total;
    const Wide scaled = count * static_cast<Wide>(n_impls);  // share * |C|, over total
    if (scaled > total) return params.epsilon;
    const Wide numerator = static_cast<Wide>(params.r_max) * total - scaled * (params.r_max - params.r_min);
    return static_cast<RewardUnits>((2 * numerator + total) / (2 * total));
}

DistributionWindow::DistributionWindow(WindowConfig config) : config_(config) {
    if (config_.mode == WindowMode::Sliding && config_.size == 0) {
        throw Error("sliding window needs a positive size");
    }
    if (config_.mode == WindowMode::Cumulative) config_.size = 0;
}

void DistributionWindow::record(std::uint64_t block, const Digest& digest) {
    ++counts_[digest];
    ++total_;
    if (config_.mode == WindowMode::Sliding) {
        recent_.push_back({block, digest});
        trim();
    }
}

void DistributionWindow::trim() {
    if (config_.mode != WindowMode::Sliding) return;
    while (recent_.size() > config_.size) {
        const Digest oldest = recent_.front().digest;
        recent_.pop_front();
        if (--counts_[oldest] == 0) counts_.erase(oldest);
        --total_;
    }
}

void DistributionWindow::purge(const Digest& digest) {
    const auto it = counts_.find(digest);
    if (it == counts_.end()) return;
    total_ -= it->second;
    counts_.erase(it);
    std::erase_if(recent_, [&](const Entry& e) { return e.digest == digest; });
}

std::uint64_t DistributionWindow::count(const Digest& digest) const {
    const auto it = counts_.find(digest);
    return it == counts_.end() ? 0 : it->second;
}

std::string_view to_string(SubmitReason reason) {
    switch (reason) {
        case SubmitReason::Ok: return "OK";
        case SubmitReason::NotExpected: return "NOT_EXPECTED";
        case SubmitReason::Duplicate: return "DUPLICATE";
        case SubmitReason::Stale: return "STALE";
        case SubmitReason::VerifyFail: return "VERIFY_FAIL";
        case SubmitReason::InsufficientTreasury: return "INSUFFICIENT_TREASURY";
    }
    return "UNKNOWN";
}

ContractState::ContractState(Address owner, CommitmentRegistry registry, RewardParams params, WindowConfig window,
                             RewardUnits treasury)
    : owner_(owner), registry_(std::move(registry)), params_(params), window_(window), treasury_(treasury) {
    if (!params_.valid()) throw ContractError(ContractError::Kind::InvalidParams, "reward parameters out of order");
    if (treasury_ < 0) throw ContractError(ContractError::Kind::InvalidParams, "treasury must be non-negative");
}

RewardOutcome ContractState::submit_proof(const ExecutionProof& proof) {
    RewardOutcome outcome;
    if (!validators_.contains(proof.submitter)) {
        outcome.reason = SubmitReason::NotExpected;
        return outcome;
    }
    if (proof.block_number != current_block_) {
        outcome.reason = SubmitReason::Stale;
        return outcome;
    }
    if (submitted_this_block_.contains(proof.submitter)) {
        outcome.reason = SubmitReason::Duplicate;
        return outcome;
    }
    try {
        verify_proof(registry_, trusted_keys_, proof);
    } catch (const ProofError& e) {
        outcome.reason = SubmitReason::VerifyFail;
        outcome.verify_error = e.kind();
        return outcome;
    }

    const CodeIdentity* identity = registry_.find(proof.commitment_digest);
    outcome.share_at_submission = share_of(identity->impl_id);
    const RewardUnits owed = reward(outcome.share_at_submission, impl_count(), params_);

    window_.record(current_block_, proof.commitment_digest);
    submitted_this_block_.insert(proof.submitter);
    if (owed > treasury_) {
        outcome.reason = SubmitReason::InsufficientTreasury;
        return outcome;
    }
    treasury_ -= owed;
    outcome.accepted = true;
    outcome.reward = owed;
    outcome.reason = SubmitReason::Ok;
    return outcome;
}

void ContractState::advance_block() {
    ++current_block_;
    submitted_this_block_.clear();
    window_.trim();
}

std::map<ImplId, std::uint64_t> ContractState::impl_counts() const {
    std::map<ImplId, std::uint64_t> out;
    for (const auto& e : registry_.entries()) out[e.impl_id] += window_.count(e.digest);
    return out;
}

Share ContractState::share_of(const ImplId& impl_id) const {
    Share share{0, window_.total()};
    for (const auto& e : registry_.entries()) {
        if (e.impl_id == impl_id) share.count += window_.count(e.digest);
    }
    return share;
}

ImplId ContractState::get_minority() const {
    if (registry_.empty()) throw ContractError(ContractError::Kind::EmptyRegistry, "no approved implementations");
    const auto counts = impl_counts();
    // std::map iterates in id order, so min_element keeps the smallest id on ties.
    return std::min_element(counts.begin(), counts.end(),
                            [](const auto& a, const auto& b) { return a.second < b.second; })
        ->first;
}

std::map<ImplId, double> ContractState::get_distribution() const {
    std::map<ImplId, double> out;
    const double total = static_cast<double>(window_.total());
    for (const auto& [impl, count] : impl_counts()) out[impl] = total == 0 ? 0.0 : static_cast<double>(count) / total;
    return out;
}

void ContractState::require_owner(const Address& caller) const {
    if (caller != owner_) throw ContractError(ContractError::Kind::NotOwner, "caller is not the contract owner");
}

void ContractState::owner_set_params(const Address& caller, const RewardParams& params) {
    require_owner(caller);
    if (!params.valid()) {
        throw ContractError(ContractError::Kind::InvalidParams, "reward parameters must satisfy r_max >= r_min > epsilon >= 0");
    }
    params_ = params;
}

void ContractState::owner_add_version(const Address& caller, const CodeIdentity& identity) {
    require_owner(caller);
    registry_.add(identity);
}

void ContractState::owner_remove_version(const Address& caller, const ImplId& impl_id, const std::string& step_id) {
    require_owner(caller);
    const CodeIdentity* identity = registry_.find(impl_id, step_id);
    if (identity == nullptr) {
        throw ContractError(ContractError::Kind::UnknownVersion, "no registered version " + impl_id + "/" + step_id);
    }
    window_.purge(identity->digest);
    registry_.remove(impl_id, step_id);
}

void ContractState::owner_add_validator(const Address& caller, const Address& validator) {
    require_owner(caller);
    validators_.insert(validator);
}

void ContractState::owner_trust_key(const Address& caller, const PublicKey& key) {
    require_owner(caller);
    trusted_keys_.insert(key);
}

void ContractState::owner_fund(const Address& caller, RewardUnits amount) {
    require_owner(caller);
    if (amount < 0 || treasury_ > std::numeric_limits<RewardUnits>::max() - amount) {
        throw ContractError(ContractError::Kind::InvalidParams, "invalid funding amount");
    }
    treasury_ += amount;
}

}  // namespace cdiv
