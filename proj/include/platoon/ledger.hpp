#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "platoon/decimal.hpp"
#include "platoon/domain.hpp"
#include "platoon/earnings.hpp"

namespace platoon::ledger {

/// Account of the tokenization contract: mints the fixed supply and
/// authorizes the driver-record account to spend it.
inline constexpr std::string_view kTokenAuthority = "token-authority";
/// Account of the driver-record contract: credits wallets, stores records.
inline constexpr std::string_view kDriverRecord = "driver-record";

std::string wallet_of(std::string_view driver_id);

using Digest = std::array<std::uint8_t, 32>;

std::string to_hex(const Digest& d);
Digest sha256(std::span<const std::uint8_t> bytes);

enum class TxKind : std::uint8_t { Mint = 1, Approve = 2, TransferFrom = 3, CreditDriver = 4, StoreRecord = 5 };
std::string_view to_string(TxKind) noexcept;

struct DriverRecord {
  std::string driver_id;
  Decimal current_earnings;
  Rank rank{1};
  std::uint64_t over_speed_count = 0;
  Decimal distance_travelled;
  std::uint64_t sharp_accel_count = 0;
  std::uint64_t sharp_decel_count = 0;
  std::uint64_t platoons_joined = 0;
  bool leader_activity = false;
  Date earning_date;

  friend bool operator==(const DriverRecord&, const DriverRecord&) = default;
};

struct Transaction {
  TxKind kind = TxKind::Mint;
  std::string submitter;  // signs the transaction and owns the nonce
  std::string from_account;
  std::string to_account;
  std::optional<TokenAmount> amount;
  std::optional<DriverRecord> record;
  std::uint64_t nonce = 0;

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct Block {
  std::uint64_t index = 0;
  std::int64_t timestamp = 0;
  Digest prev_hash{};
  std::vector<Transaction> transactions;
  Digest hash{};

  /// Canonical bytes of (index, timestamp, prev_hash, transactions).
  std::vector<std::uint8_t> body_bytes() const;
  Digest compute_hash() const;
};

Block make_genesis();

/// Balances, allowances and stored records as of some block.
class AccountState {
 public:
  /// Validates `tx` against the current state and applies it, or throws
  /// without modifying anything.
  void apply(const Transaction& tx);

  TokenAmount balance_of(std::string_view account) const;
  TokenAmount allowance(std::string_view owner, std::string_view spender) const;
  const TokenAmount& total_supply() const noexcept { return total_supply_; }
  bool minted() const noexcept { return minted_; }
  std::uint8_t decimals() const noexcept { return total_supply_.decimals; }
  std::uint64_t next_nonce(std::string_view account) const;
  bool has_account(std::string_view account) const;
  std::vector<DriverRecord> records_for(std::string_view driver_id) const;
  bool has_record(std::string_view driver_id, const Date& date) const;
  TokenAmount sum_of_balances() const;

  friend bool operator==(const AccountState&, const AccountState&) = default;

 private:
  TokenAmount zero() const { return TokenAmount{0, total_supply_.decimals}; }
  void require_amount(const Transaction& tx, bool allow_zero) const;

  std::map<std::string, TokenAmount, std::less<>> balances_;
  std::map<std::pair<std::string, std::string>, TokenAmount> allowances_;
  TokenAmount total_supply_{0, TokenAmount::kDefaultDecimals};
  bool minted_ = false;
  std::map<std::string, std::uint64_t, std::less<>> nonces_;
  std::map<std::string, std::map<Date, DriverRecord>, std::less<>> records_;
};

/// Builds the transactions of one block against a scratch copy of the state,
/// so each builder call fails with its specific error before anything is
/// committed. Nonces are assigned in call order.
class BlockBuilder {
 public:
  explicit BlockBuilder(AccountState base) : state_(std::move(base)) {}

  const Transaction& mint(std::string_view authority, const TokenAmount& amount);
  const Transaction& approve(std::string_view owner, std::string_view spender, const TokenAmount& amount);
  const Transaction& transfer_from(std::string_view spender, std::string_view owner, std::string_view to,
                                   const TokenAmount& amount);
  /// Emits CreditDriver followed by the paired StoreRecord.
  std::pair<Transaction, Transaction> credit_driver(std::string_view driver_record_account,
                                                    std::string_view driver_wallet, const Settlement& settlement,
                                                    const DriverRecord& record);

  const AccountState& state() const noexcept { return state_; }
  const std::vector<Transaction>& transactions() const noexcept { return txs_; }
  std::vector<Transaction> take() && { return std::move(txs_); }

 private:
  const Transaction& push(Transaction tx);

  AccountState state_;
  std::vector<Transaction> txs_;
};

/// Builds the on-chain record for a settled day.
DriverRecord make_record(const DriverProfile& driver, const Settlement& settlement);

struct CorruptionReport {
  std::uint64_t block_index = 0;
  std::string field;  // "encoding", "index", "prev_hash", "hash", "transactions", "state"
  std::string detail;
};

struct VerifyResult {
  std::uint64_t blocks = 0;
  std::optional<CorruptionReport> corruption;
  bool ok() const noexcept { return !corruption; }
};

/// Recomputes hashes and links, replays every transaction from genesis and,
/// when `snapshot` is given, compares the replayed state with it.
VerifyResult verify_chain(std::span<const Block> chain, const AccountState* snapshot = nullptr);

/// File layout: a sequence of records, each a 4-byte big-endian length
/// followed by the canonical block body and its 32-byte hash.
std::vector<std::uint8_t> encode_record(const Block& block);
VerifyResult verify_file(const std::filesystem::path& path);

/// Append-only chain with an in-memory state rebuilt by replay on open.
/// Commits are serialized; reads see the last committed state.
class Ledger {
 public:
  /// In-memory chain holding only the genesis block.
  Ledger();
  /// Opens `path`, creating it with a genesis block when absent. Throws
  /// Error{Corrupt} if the file fails verification.
  static std::unique_ptr<Ledger> open(const std::filesystem::path& path);

  Ledger(const Ledger&) = delete;
  Ledger& operator=(const Ledger&) = delete;

  /// Validates all transactions in order and appends them as one block;
  /// any invalid transaction rejects the whole block (Error{ValidationFailed}).
  Block append_block(std::vector<Transaction> pending, std::int64_t timestamp);

  BlockBuilder builder() const { return BlockBuilder(state()); }

  AccountState state() const;
  std::vector<Block> blocks() const;
  std::size_t height() const;
  TokenAmount balance_of(std::string_view account) const;
  std::vector<DriverRecord> records_for(std::string_view driver_id) const;
  VerifyResult verify() const;
  const std::optional<std::filesystem::path>& path() const noexcept { return path_; }

 private:
  mutable std::shared_mutex mutex_;
  std::vector<Block> chain_;
  AccountState state_;
  std::optional<std::filesystem::path> path_;
};

}  // namespace platoon::ledger
