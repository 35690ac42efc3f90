#include "slashsim/escrow.hpp"

#include <algorithm>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>

namespace slashsim {

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Deposited: return "Deposited";
        case EventKind::ExitSigned: return "ExitSigned";
        case EventKind::ExitFinalized: return "ExitFinalized";
        case EventKind::Slashed: return "Slashed";
        case EventKind::EpochTick: return "EpochTick";
    }
    return "?";
}

const char* to_string(EscrowState state) {
    switch (state) {
        case EscrowState::Open: return "Open";
        case EscrowState::Funded: return "Funded";
        case EscrowState::SettledPayout: return "SettledPayout";
        case EscrowState::SettledRefund: return "SettledRefund";
        case EscrowState::ExpiredNoDeposit: return "ExpiredNoDeposit";
    }
    return "?";
}

const char* to_string(SettlementOutcome outcome) {
    switch (outcome) {
        case SettlementOutcome::Payout: return "Payout";
        case SettlementOutcome::Refund: return "Refund";
        case SettlementOutcome::NoDeposit: return "NoDeposit";
    }
    return "?";
}

ChainEvent ChainEvent::deposited(Gwei amount, Epoch epoch) {
    return ChainEvent{.kind = EventKind::Deposited, .epoch = epoch, .amount = amount};
}
ChainEvent ChainEvent::exit_signed(ValidatorId v, Epoch epoch) {
    return ChainEvent{.kind = EventKind::ExitSigned, .epoch = epoch, .validator = v};
}
ChainEvent ChainEvent::exit_finalized(ValidatorId v, Epoch epoch) {
    return ChainEvent{.kind = EventKind::ExitFinalized, .epoch = epoch, .validator = v};
}
ChainEvent ChainEvent::slashed(ValidatorId v, Epoch epoch) {
    return ChainEvent{.kind = EventKind::Slashed, .epoch = epoch, .validator = v};
}
ChainEvent ChainEvent::epoch_tick(Epoch epoch) {
    return ChainEvent{.kind = EventKind::EpochTick, .epoch = epoch};
}

EscrowContract EscrowContract::create(Gwei ransom, Epoch deadline,
                                      std::set<ValidatorId> compromised, Epoch created_at) {
    if (ransom == 0) throw DomainError("escrow: ransom must be positive");
    if (compromised.empty()) throw DomainError("escrow: compromised set must be non-empty");
    if (deadline <= created_at) throw DomainError("escrow: deadline must be in the future");
    EscrowContract c;
    c.ransom_ = ransom;
    c.deadline_ = deadline;
    c.compromised_ = std::move(compromised);
    c.last_epoch_ = created_at;
    return c;
}

bool EscrowContract::payout_ready() const {
    return exits_signed_ == compromised_ && exits_finalized_ == compromised_ &&
           slashed_members_.empty();
}

TransferAction EscrowContract::settle_payout() {
    state_ = EscrowState::SettledPayout;
    TransferAction action{.to_attacker = ransom_, .to_victim = deposit_held_ - ransom_};
    deposit_held_ = 0;
    return action;
}

TransferAction EscrowContract::settle_refund() {
    state_ = EscrowState::SettledRefund;
    TransferAction action{.to_victim = deposit_held_};
    deposit_held_ = 0;
    return action;
}

TransferAction EscrowContract::on_event(const ChainEvent& event) {
    if (terminal()) return {};
    if (saw_event_ && event.epoch < last_epoch_)
        throw ProtocolError("escrow: event epoch " + std::to_string(event.epoch) +
                            " precedes epoch " + std::to_string(last_epoch_));
    saw_event_ = true;
    last_epoch_ = event.epoch;

    const bool targets_member = event.kind != EventKind::Deposited &&
                                event.kind != EventKind::EpochTick &&
                                compromised_.count(event.validator) > 0;

    switch (event.kind) {
        case EventKind::Deposited: {
            const bool qualifying = state_ == EscrowState::Open && event.amount >= ransom_ &&
                                    event.epoch <= deadline_;
            if (!qualifying) return TransferAction{.to_victim = event.amount};  // bounce
            if (!slashed_members_.empty()) {
                // Payout already impossible; accept and return in one step.
                state_ = EscrowState::SettledRefund;
                return TransferAction{.to_victim = event.amount};
            }
            deposit_held_ = event.amount;
            state_ = EscrowState::Funded;
            if (payout_ready()) return settle_payout();  // validators exited beforehand
            return {};
        }
        case EventKind::ExitSigned:
            if (!targets_member) return {};
            if (event.epoch <= deadline_) {
                exits_signed_.insert(event.validator);
                if (state_ == EscrowState::Funded && payout_ready()) return settle_payout();
            }
            return {};
        case EventKind::ExitFinalized:
            if (!targets_member) return {};
            // Finalizations only count for validators that signed in time.
            if (exits_signed_.count(event.validator) > 0) {
                exits_finalized_.insert(event.validator);
                if (state_ == EscrowState::Funded && payout_ready()) return settle_payout();
            }
            return {};
        case EventKind::Slashed:
            if (!targets_member) return {};
            // A fully finalized validator can no longer be slashed on chain.
            if (exits_finalized_.count(event.validator) > 0) return {};
            slashed_members_.insert(event.validator);
            if (state_ == EscrowState::Funded) return settle_refund();
            return {};
        case EventKind::EpochTick:
            if (event.epoch > deadline_) {
                if (state_ == EscrowState::Open) {
                    state_ = EscrowState::ExpiredNoDeposit;
                    return {};
                }
                if (state_ == EscrowState::Funded && exits_signed_ != compromised_)
                    return settle_refund();
            }
            return {};
    }
    return {};
}

SettlementOutcome EscrowContract::projected_outcome() const {
    switch (state_) {
        case EscrowState::SettledPayout: return SettlementOutcome::Payout;
        case EscrowState::SettledRefund: return SettlementOutcome::Refund;
        case EscrowState::ExpiredNoDeposit: return SettlementOutcome::NoDeposit;
        case EscrowState::Open: return SettlementOutcome::NoDeposit;
        case EscrowState::Funded: return SettlementOutcome::Refund;
    }
    return SettlementOutcome::NoDeposit;
}

SettlementOutcome settlement_outcome(std::span<const ChainEvent> history, Gwei ransom,
                                     Epoch deadline, const std::set<ValidatorId>& compromised) {
    bool qualifying_deposit = false;
    for (const auto& ev : history) {
        if (ev.kind == EventKind::Deposited && ev.amount >= ransom && ev.epoch <= deadline)
            qualifying_deposit = true;
    }
    if (!qualifying_deposit) return SettlementOutcome::NoDeposit;

    // Per member: first timely signature, then the first finalization after
    // it in stream order. Payout needs both for every member, plus no member
    // slashed ahead of its own finalization (with the canonical same-epoch
    // ordering this is exactly "slashed at or before finalization").
    for (const ValidatorId member : compromised) {
        std::size_t sign_index = history.size();
        for (std::size_t i = 0; i < history.size(); ++i) {
            const auto& ev = history[i];
            if (ev.kind == EventKind::ExitSigned && ev.validator == member &&
                ev.epoch <= deadline) {
                sign_index = i;
                break;
            }
        }
        if (sign_index == history.size()) return SettlementOutcome::Refund;  // never signed

        std::size_t fin_index = history.size();
        for (std::size_t i = sign_index + 1; i < history.size(); ++i) {
            const auto& ev = history[i];
            if (ev.kind == EventKind::ExitFinalized && ev.validator == member) {
                fin_index = i;
                break;
            }
        }
        if (fin_index == history.size()) return SettlementOutcome::Refund;  // never exited

        for (std::size_t i = 0; i < fin_index; ++i) {
            const auto& ev = history[i];
            if (ev.kind == EventKind::Slashed && ev.validator == member)
                return SettlementOutcome::Refund;  // slashed before resolving
        }
    }
    return SettlementOutcome::Payout;
}

ChainEvent ChainEvent::from_json(const nlohmann::json& doc) {
    ChainEvent ev;
    const auto kind = doc.at("kind").get<std::string>();
    if (kind == "Deposited") {
        ev.kind = EventKind::Deposited;
        ev.amount = doc.at("amount").get<Gwei>();
    } else if (kind == "ExitSigned") {
        ev.kind = EventKind::ExitSigned;
        ev.validator = doc.at("validator").get<ValidatorId>();
    } else if (kind == "ExitFinalized") {
        ev.kind = EventKind::ExitFinalized;
        ev.validator = doc.at("validator").get<ValidatorId>();
    } else if (kind == "Slashed") {
        ev.kind = EventKind::Slashed;
        ev.validator = doc.at("validator").get<ValidatorId>();
    } else if (kind == "EpochTick") {
        ev.kind = EventKind::EpochTick;
    } else {
        throw ConfigError("kind", "unknown event kind '" + kind + "'");
    }
    ev.epoch = doc.at("epoch").get<Epoch>();
    return ev;
}

nlohmann::json ChainEvent::to_json() const {
    nlohmann::json doc{{"kind", to_string(kind)}, {"epoch", epoch}};
    if (kind == EventKind::Deposited) doc["amount"] = amount;
    if (kind == EventKind::ExitSigned || kind == EventKind::ExitFinalized ||
        kind == EventKind::Slashed)
        doc["validator"] = validator;
    return doc;
}

EscrowContract EscrowContract::from_json(const nlohmann::json& doc) {
    std::set<ValidatorId> compromised;
    for (const auto& v : doc.at("compromised")) compromised.insert(v.get<ValidatorId>());
    return create(doc.at("ransom").get<Gwei>(), doc.at("deadline").get<Epoch>(),
                  std::move(compromised),
                  doc.contains("created_at") ? doc["created_at"].get<Epoch>() : 0);
}

nlohmann::json EscrowContract::to_json() const {
    return nlohmann::json{
        {"ransom", ransom_},
        {"deadline", deadline_},
        {"compromised", compromised_},
        {"state", to_string(state_)},
        {"deposit_held", deposit_held_},
        {"exits_signed", exits_signed_},
        {"exits_finalized", exits_finalized_},
    };
}

std::vector<ChainEvent> read_event_trace(std::istream& in) {
    std::vector<ChainEvent> events;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
            events.push_back(ChainEvent::from_json(doc));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("trace line " + std::to_string(line_no), e.what());
        }
    }
    canonicalize_same_epoch_order(events);
    return events;
}

void write_event_trace(std::ostream& out, std::span<const ChainEvent> events) {
    for (const auto& ev : events) out << ev.to_json().dump() << "\n";
}

void canonicalize_same_epoch_order(std::vector<ChainEvent>& events) {
    // Slashing precedence: within an epoch, Slashed events come first; the
    // stable sort keeps every other same-epoch order as delivered.
    std::stable_sort(events.begin(), events.end(), [](const ChainEvent& a, const ChainEvent& b) {
        if (a.epoch != b.epoch) return a.epoch < b.epoch;
        const auto rank = [](const ChainEvent& e) { return e.kind == EventKind::Slashed ? 0 : 1; };
        return rank(a) < rank(b);
    });
}

}  // namespace slashsim
