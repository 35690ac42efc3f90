#pragma once

#include <iosfwd>
#include <nlohmann/json_fwd.hpp>
#include <set>
#include <span>
#include <vector>

#include "slashsim/types.hpp"

namespace slashsim {

enum class EventKind : std::uint8_t { Deposited, ExitSigned, ExitFinalized, Slashed, EpochTick };

const char* to_string(EventKind kind);

/// An observable chain fact fed to the contract by the oracle. Epochs must
/// be nondecreasing across a stream; within one epoch, Slashed events are
/// delivered before ExitFinalized events (slashing precedence).
struct ChainEvent {
    EventKind kind = EventKind::EpochTick;
    Epoch epoch = 0;
    ValidatorId validator = 0;  // ExitSigned / ExitFinalized / Slashed
    Gwei amount = 0;            // Deposited

    bool operator==(const ChainEvent&) const = default;

    static ChainEvent deposited(Gwei amount, Epoch epoch);
    static ChainEvent exit_signed(ValidatorId v, Epoch epoch);
    static ChainEvent exit_finalized(ValidatorId v, Epoch epoch);
    static ChainEvent slashed(ValidatorId v, Epoch epoch);
    static ChainEvent epoch_tick(Epoch epoch);

    static ChainEvent from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;
};

enum class EscrowState : std::uint8_t {
    Open,
    Funded,
    SettledPayout,
    SettledRefund,
    ExpiredNoDeposit,
};

const char* to_string(EscrowState state);

/// Money the contract releases while processing one event. At most one
/// settlement transfer happens over a contract's lifetime; bounced deposits
/// (wrong amount, late, already funded, doomed) return the attempted amount
/// immediately.
struct TransferAction {
    Gwei to_attacker = 0;
    Gwei to_victim = 0;

    bool none() const { return to_attacker == 0 && to_victim == 0; }
    bool operator==(const TransferAction&) const = default;
};

enum class SettlementOutcome : std::uint8_t { Payout, Refund, NoDeposit };

const char* to_string(SettlementOutcome outcome);

/// Self-enforcing ransom escrow: pays the attacker once every compromised
/// validator has signed to exit by the deadline and finalized without being
/// slashed; otherwise the deposit goes back to the victim.
class EscrowContract {
public:
    /// ransom > 0, compromised non-empty, deadline strictly after created_at.
    static EscrowContract create(Gwei ransom, Epoch deadline, std::set<ValidatorId> compromised,
                                 Epoch created_at = 0);

    /// Applies one event. Terminal states absorb everything with no action.
    /// Throws ProtocolError if the event's epoch moves backwards.
    TransferAction on_event(const ChainEvent& event);

    EscrowState state() const { return state_; }
    bool terminal() const {
        return state_ == EscrowState::SettledPayout || state_ == EscrowState::SettledRefund ||
               state_ == EscrowState::ExpiredNoDeposit;
    }
    Gwei ransom() const { return ransom_; }
    Epoch deadline() const { return deadline_; }
    Gwei deposit_held() const { return deposit_held_; }
    const std::set<ValidatorId>& compromised() const { return compromised_; }
    const std::set<ValidatorId>& exits_signed() const { return exits_signed_; }
    const std::set<ValidatorId>& exits_finalized() const { return exits_finalized_; }

    /// What settlement this contract's history leads to: terminal states map
    /// directly, a live Open contract to NoDeposit, a live Funded one to
    /// Refund (the deposit would come back if the world stopped here).
    SettlementOutcome projected_outcome() const;

    static EscrowContract from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;

private:
    EscrowContract() = default;

    TransferAction settle_payout();
    TransferAction settle_refund();
    bool payout_ready() const;

    Gwei ransom_ = 0;
    Epoch deadline_ = 0;
    std::set<ValidatorId> compromised_;
    EscrowState state_ = EscrowState::Open;
    Gwei deposit_held_ = 0;
    std::set<ValidatorId> exits_signed_;     // signed by the deadline
    std::set<ValidatorId> exits_finalized_;  // finalized after a counted signature
    std::set<ValidatorId> slashed_members_;  // slashed before finalizing
    Epoch last_epoch_ = 0;
    bool saw_event_ = false;
};

/// Pure reference oracle: decides the outcome by inspecting the whole
/// (epoch-ordered) history at once. Folding on_event over the same history
/// must agree.
SettlementOutcome settlement_outcome(std::span<const ChainEvent> history, Gwei ransom,
                                     Epoch deadline, const std::set<ValidatorId>& compromised);

/// JSONL trace IO: one event object per line. The reader canonicalizes
/// same-epoch ordering (Slashed ahead of ExitFinalized).
std::vector<ChainEvent> read_event_trace(std::istream& in);
void write_event_trace(std::ostream& out, std::span<const ChainEvent> events);
void canonicalize_same_epoch_order(std::vector<ChainEvent>& events);

}  // namespace slashsim
