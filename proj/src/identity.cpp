#include <cdiv/identity.hpp>

#include <algorithm>
#include <tuple>

namespace cdiv {

CodeIdentity compute_commitment(const CodeSegment& segment) {
    if (segment.impl_id.empty() || segment.step_id.empty()) {
        throw IdentityError(IdentityError::Kind::RejectedInput, "code segment needs an impl id and a step id");
    }
    if (segment.code.empty()) {
        throw IdentityError(IdentityError::Kind::RejectedInput,
                            "code segment " + segment.impl_id + "/" + segment.step_id + " is empty");
    }
    return CodeIdentity{segment.impl_id, segment.step_id, sha256(segment.code)};
}

void CommitmentRegistry::add(const CodeIdentity& identity) {
    if (const auto* clash = find(identity.digest)) {
        throw IdentityError(IdentityError::Kind::NonDistinctFingerprint,
                            "code of " + identity.impl_id + "/" + identity.step_id + " has the same digest as " +
                                clash->impl_id + "/" + clash->step_id + "; not a distinct fingerprint");
    }
    if (find(identity.impl_id, identity.step_id) != nullptr) {
        throw IdentityError(IdentityError::Kind::DuplicateKey,
                            "duplicate registry key " + identity.impl_id + "/" + identity.step_id);
    }
    const auto pos = std::lower_bound(entries_.begin(), entries_.end(), identity, [](const auto& a, const auto& b) {
        return std::tie(a.impl_id, a.step_id) < std::tie(b.impl_id, b.step_id);
    });
    entries_.insert(pos, identity);
}

CodeIdentity CommitmentRegistry::remove(const ImplId& impl_id, const std::string& step_id) {
    const auto it = std::find_if(entries_.begin(), entries_.end(),
                                 [&](const auto& e) { return e.impl_id == impl_id && e.step_id == step_id; });
    if (it == entries_.end()) {
        throw IdentityError(IdentityError::Kind::UnknownIdentity, "no registered version " + impl_id + "/" + step_id);
    }
    CodeIdentity removed = *it;
    entries_.erase(it);
    return removed;
}

const CodeIdentity* CommitmentRegistry::find(const Digest& digest) const {
    const auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.digest == digest; });
    return it == entries_.end() ? nullptr : &*it;
}

const CodeIdentity* CommitmentRegistry::find(const ImplId& impl_id, const std::string& step_id) const {
    const auto it = std::find_if(entries_.begin(), entries_.end(),
                                 [&](const auto& e) { return e.impl_id == impl_id && e.step_id == step_id; });
    return it == entries_.end() ? nullptr : &*it;
}

std::vector<ImplId> CommitmentRegistry::impls() const {
    std::vector<ImplId> out;
    for (const auto& e : entries_) {
        if (out.empty() || out.back() != e.impl_id) out.push_back(e.impl_id);
    }
    return out;
}

CommitmentRegistry build_registry(const std::vector<CodeSegment>& segments) {
    if (segments.empty()) {
        throw IdentityError(IdentityError::Kind::EmptyRegistry, "registry needs at least one code segment");
    }
    CommitmentRegistry registry;
    for (const auto& segment : segments) registry.add(compute_commitment(segment));
    return registry;
}

}  // namespace cdiv
