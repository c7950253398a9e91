#include "platoon/ledger.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iterator>
#include <mutex>

#include "platoon/error.hpp"

namespace platoon::ledger {
namespace {

// Canonical encoding: big-endian integers, u32-length-prefixed strings,
// fixed field order.
class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void u64(std::uint64_t v) {
    for (int s = 56; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  void digest(const Digest& d) { out_.insert(out_.end(), d.begin(), d.end()); }
  std::vector<std::uint8_t> take() && { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_++];
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  bool flag() {
    std::uint8_t v = u8();
    if (v > 1) fail("boolean byte out of range");
    return v == 1;
  }
  std::string str() {
    std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  Digest digest() {
    need(32);
    Digest d;
    std::copy_n(in_.begin() + static_cast<std::ptrdiff_t>(pos_), 32, d.begin());
    pos_ += 32;
    return d;
  }
  bool done() const noexcept { return pos_ == in_.size(); }
  [[noreturn]] static void fail(const std::string& msg) { throw Error(ErrorCode::Corrupt, msg); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) fail("truncated block body");
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void write_record(Writer& w, const DriverRecord& r) {
  w.str(r.driver_id);
  w.str(r.current_earnings.str());
  w.u8(static_cast<std::uint8_t>(r.rank.value()));
  w.u64(r.over_speed_count);
  w.str(r.distance_travelled.str());
  w.u64(r.sharp_accel_count);
  w.u64(r.sharp_decel_count);
  w.u64(r.platoons_joined);
  w.u8(r.leader_activity ? 1 : 0);
  w.str(r.earning_date.str());
}

Decimal read_decimal(Reader& r) {
  auto d = Decimal::try_parse(r.str());
  if (!d) Reader::fail("malformed decimal");
  return *d;
}

DriverRecord read_record(Reader& r) {
  DriverRecord rec;
  rec.driver_id = r.str();
  rec.current_earnings = read_decimal(r);
  std::uint8_t rank = r.u8();
  if (rank < Rank::kMin || rank > Rank::kMax) Reader::fail("rank out of range");
  rec.rank = Rank(rank);
  rec.over_speed_count = r.u64();
  rec.distance_travelled = read_decimal(r);
  rec.sharp_accel_count = r.u64();
  rec.sharp_decel_count = r.u64();
  rec.platoons_joined = r.u64();
  rec.leader_activity = r.flag();
  try {
    rec.earning_date = Date::parse(r.str());
  } catch (const Error&) {
    Reader::fail("malformed date");
  }
  return rec;
}

void write_tx(Writer& w, const Transaction& tx) {
  w.u8(static_cast<std::uint8_t>(tx.kind));
  w.str(tx.submitter);
  w.str(tx.from_account);
  w.str(tx.to_account);
  w.u8(tx.amount ? 1 : 0);
  if (tx.amount) {
    w.u64(tx.amount->base_units);
    w.u8(tx.amount->decimals);
  }
  w.u8(tx.record ? 1 : 0);
  if (tx.record) write_record(w, *tx.record);
  w.u64(tx.nonce);
}

Transaction read_tx(Reader& r) {
  Transaction tx;
  std::uint8_t kind = r.u8();
  if (kind < 1 || kind > 5) Reader::fail("unknown transaction kind");
  tx.kind = static_cast<TxKind>(kind);
  tx.submitter = r.str();
  tx.from_account = r.str();
  tx.to_account = r.str();
  if (r.flag()) {
    TokenAmount a;
    a.base_units = r.u64();
    a.decimals = r.u8();
    tx.amount = a;
  }
  if (r.flag()) tx.record = read_record(r);
  tx.nonce = r.u64();
  return tx;
}

Block read_body(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  Block b;
  b.index = r.u64();
  b.timestamp = r.i64();
  b.prev_hash = r.digest();
  std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) b.transactions.push_back(read_tx(r));
  if (!r.done()) Reader::fail("trailing bytes in block body");
  return b;
}

struct ParsedFile {
  std::vector<Block> blocks;
  std::optional<CorruptionReport> corruption;
};

ParsedFile parse_file(std::span<const std::uint8_t> bytes) {
  ParsedFile out;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::uint64_t index = out.blocks.size();
    auto corrupt = [&](const std::string& detail) {
      out.corruption = CorruptionReport{index, "encoding", detail};
      return out;
    };
    if (bytes.size() - pos < 4) return corrupt("truncated record length");
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len = (len << 8) | bytes[pos + static_cast<std::size_t>(i)];
    pos += 4;
    if (len < 32 || len > bytes.size() - pos) return corrupt("record length out of range");
    auto record = bytes.subspan(pos, len);
    pos += len;
    try {
      Block b = read_body(record.first(len - 32));
      std::copy_n(record.begin() + (len - 32), 32, b.hash.begin());
      out.blocks.push_back(std::move(b));
    } catch (const Error& e) {
      return corrupt(e.what());
    }
  }
  if (out.blocks.empty()) out.corruption = CorruptionReport{0, "encoding", "missing genesis block"};
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open ledger '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void append_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::Io, "cannot open ledger '" + path.string() + "' for append");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "append to ledger '" + path.string() + "' failed");
}

}  // namespace

std::string wallet_of(std::string_view driver_id) { return "wallet/" + std::string(driver_id); }

std::string to_hex(const Digest& d) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s;
  for (auto b : d) {
    s.push_back(kHex[b >> 4]);
    s.push_back(kHex[b & 0xF]);
  }
  return s;
}

Digest sha256(std::span<const std::uint8_t> bytes) {
  Digest d{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), d.data(), &len, EVP_sha256(), nullptr) != 1 || len != d.size()) {
    throw Error(ErrorCode::Io, "SHA-256 computation failed");
  }
  return d;
}

std::string_view to_string(TxKind k) noexcept {
  switch (k) {
    case TxKind::Mint: return "Mint";
    case TxKind::Approve: return "Approve";
    case TxKind::TransferFrom: return "TransferFrom";
    case TxKind::CreditDriver: return "CreditDriver";
    case TxKind::StoreRecord: return "StoreRecord";
  }
  return "?";
}

std::vector<std::uint8_t> Block::body_bytes() const {
  Writer w;
  w.u64(index);
  w.i64(timestamp);
  w.digest(prev_hash);
  w.u32(static_cast<std::uint32_t>(transactions.size()));
  for (const auto& tx : transactions) write_tx(w, tx);
  return std::move(w).take();
}

Digest Block::compute_hash() const { return sha256(body_bytes()); }

Block make_genesis() {
  Block g;
  g.hash = g.compute_hash();
  return g;
}

std::vector<std::uint8_t> encode_record(const Block& block) {
  std::vector<std::uint8_t> body = block.body_bytes();
  Writer w;
  w.u32(static_cast<std::uint32_t>(body.size() + 32));
  std::vector<std::uint8_t> out = std::move(w).take();
  out.insert(out.end(), body.begin(), body.end());
  out.insert(out.end(), block.hash.begin(), block.hash.end());
  return out;
}

// ---------------------------------------------------------------------------
// AccountState

TokenAmount AccountState::balance_of(std::string_view account) const {
  auto it = balances_.find(account);
  return it == balances_.end() ? zero() : it->second;
}

TokenAmount AccountState::allowance(std::string_view owner, std::string_view spender) const {
  auto it = allowances_.find({std::string(owner), std::string(spender)});
  return it == allowances_.end() ? zero() : it->second;
}

std::uint64_t AccountState::next_nonce(std::string_view account) const {
  auto it = nonces_.find(account);
  return it == nonces_.end() ? 0 : it->second;
}

bool AccountState::has_account(std::string_view account) const { return balances_.contains(account); }

bool AccountState::has_record(std::string_view driver_id, const Date& date) const {
  auto it = records_.find(driver_id);
  return it != records_.end() && it->second.contains(date);
}

std::vector<DriverRecord> AccountState::records_for(std::string_view driver_id) const {
  std::vector<DriverRecord> out;
  if (auto it = records_.find(driver_id); it != records_.end()) {
    for (const auto& [_, r] : it->second) out.push_back(r);
  }
  return out;
}

TokenAmount AccountState::sum_of_balances() const {
  TokenAmount sum = zero();
  for (const auto& [_, b] : balances_) sum = sum + b;
  return sum;
}

void AccountState::require_amount(const Transaction& tx, bool allow_zero) const {
  if (!tx.amount) throw Error(ErrorCode::ValidationFailed, std::string(to_string(tx.kind)) + " without an amount");
  if (tx.record) throw Error(ErrorCode::ValidationFailed, std::string(to_string(tx.kind)) + " carries a record");
  if (!minted_) throw Error(ErrorCode::ValidationFailed, "no token supply has been minted");
  if (tx.amount->decimals != decimals()) {
    throw Error(ErrorCode::ValidationFailed, "amount has " + std::to_string(tx.amount->decimals) +
                                                 " decimals, ledger uses " + std::to_string(decimals()));
  }
  if (!allow_zero && tx.amount->base_units == 0) {
    throw Error(ErrorCode::ValidationFailed, std::string(to_string(tx.kind)) + " amount must be positive");
  }
}

void AccountState::apply(const Transaction& tx) {
  if (tx.nonce != next_nonce(tx.submitter)) {
    throw Error(ErrorCode::ValidationFailed, "nonce " + std::to_string(tx.nonce) + " from '" + tx.submitter +
                                                 "', expected " + std::to_string(next_nonce(tx.submitter)));
  }
  switch (tx.kind) {
    case TxKind::Mint: {
      if (tx.submitter != kTokenAuthority || tx.to_account != kTokenAuthority || !tx.from_account.empty()) {
        throw Error(ErrorCode::NotAuthority, "only '" + std::string(kTokenAuthority) + "' may mint");
      }
      if (minted_) throw Error(ErrorCode::AlreadyMinted, "token supply already minted");
      if (!tx.amount || tx.record) throw Error(ErrorCode::ValidationFailed, "malformed Mint");
      if (tx.amount->base_units == 0) throw Error(ErrorCode::ValidationFailed, "Mint amount must be positive");
      total_supply_ = *tx.amount;
      balances_[tx.to_account] = *tx.amount;
      minted_ = true;
      break;
    }
    case TxKind::Approve: {
      require_amount(tx, true);
      if (tx.submitter != tx.from_account) throw Error(ErrorCode::NotAuthority, "approve must be signed by the owner");
      if (!has_account(tx.from_account)) throw Error(ErrorCode::UnknownAccount, "unknown account '" + tx.from_account + "'");
      auto key = std::make_pair(tx.from_account, tx.to_account);
      if (tx.amount->base_units == 0) allowances_.erase(key);
      else allowances_[key] = *tx.amount;
      break;
    }
    case TxKind::TransferFrom: {
      require_amount(tx, false);
      const TokenAmount& amount = *tx.amount;
      TokenAmount allowed = allowance(tx.from_account, tx.submitter);
      if (allowed < amount) {
        throw Error(ErrorCode::InsufficientAllowance, "'" + tx.submitter + "' may spend " + allowed.str() + " of '" +
                                                          tx.from_account + "', requested " + amount.str());
      }
      TokenAmount from_balance = balance_of(tx.from_account);
      if (from_balance < amount) {
        throw Error(ErrorCode::InsufficientBalance, "'" + tx.from_account + "' holds " + from_balance.str() +
                                                        ", requested " + amount.str());
      }
      TokenAmount new_allowance = allowed - amount;
      TokenAmount new_from = from_balance - amount;
      TokenAmount new_to = (tx.from_account == tx.to_account ? new_from : balance_of(tx.to_account)) + amount;
      auto key = std::make_pair(tx.from_account, tx.submitter);
      if (new_allowance.base_units == 0) allowances_.erase(key);
      else allowances_[key] = new_allowance;
      balances_[tx.from_account] = new_from;
      balances_[tx.to_account] = new_to;
      break;
    }
    case TxKind::CreditDriver: {
      require_amount(tx, true);
      if (tx.submitter != kDriverRecord || tx.from_account != kDriverRecord) {
        throw Error(ErrorCode::NotAuthority, "only '" + std::string(kDriverRecord) + "' may credit drivers");
      }
      const TokenAmount& amount = *tx.amount;
      TokenAmount from_balance = balance_of(tx.from_account);
      if (from_balance < amount) {
        throw Error(ErrorCode::InsufficientBalance, "'" + tx.from_account + "' holds " + from_balance.str() +
                                                        ", credit needs " + amount.str());
      }
      TokenAmount new_from = from_balance - amount;
      TokenAmount new_to = (tx.from_account == tx.to_account ? new_from : balance_of(tx.to_account)) + amount;
      balances_[tx.from_account] = new_from;
      balances_[tx.to_account] = new_to;
      break;
    }
    case TxKind::StoreRecord: {
      if (tx.submitter != kDriverRecord) {
        throw Error(ErrorCode::NotAuthority, "only '" + std::string(kDriverRecord) + "' may store records");
      }
      if (!tx.record || tx.amount) throw Error(ErrorCode::ValidationFailed, "malformed StoreRecord");
      const DriverRecord& r = *tx.record;
      if (tx.to_account != wallet_of(r.driver_id)) {
        throw Error(ErrorCode::ValidationFailed, "record for '" + r.driver_id + "' addressed to '" + tx.to_account + "'");
      }
      if (has_record(r.driver_id, r.earning_date)) {
        throw Error(ErrorCode::DuplicateRecord,
                    "driver '" + r.driver_id + "' already has a record for " + r.earning_date.str());
      }
      records_[r.driver_id][r.earning_date] = r;
      break;
    }
    default:
      throw Error(ErrorCode::ValidationFailed, "unknown transaction kind");
  }
  ++nonces_[tx.submitter];
}

// ---------------------------------------------------------------------------
// BlockBuilder

const Transaction& BlockBuilder::push(Transaction tx) {
  tx.nonce = state_.next_nonce(tx.submitter);
  state_.apply(tx);
  txs_.push_back(std::move(tx));
  return txs_.back();
}

const Transaction& BlockBuilder::mint(std::string_view authority, const TokenAmount& amount) {
  return push(Transaction{TxKind::Mint, std::string(authority), "", std::string(authority), amount, std::nullopt, 0});
}

const Transaction& BlockBuilder::approve(std::string_view owner, std::string_view spender, const TokenAmount& amount) {
  return push(Transaction{TxKind::Approve, std::string(owner), std::string(owner), std::string(spender), amount,
                          std::nullopt, 0});
}

const Transaction& BlockBuilder::transfer_from(std::string_view spender, std::string_view owner, std::string_view to,
                                               const TokenAmount& amount) {
  return push(Transaction{TxKind::TransferFrom, std::string(spender), std::string(owner), std::string(to), amount,
                          std::nullopt, 0});
}

std::pair<Transaction, Transaction> BlockBuilder::credit_driver(std::string_view driver_record_account,
                                                                std::string_view driver_wallet,
                                                                const Settlement& settlement,
                                                                const DriverRecord& record) {
  if (record.driver_id != settlement.driver_id || record.earning_date != settlement.earning_date) {
    throw Error(ErrorCode::InvalidArgument, "record does not belong to the settlement");
  }
  TokenAmount amount = tokens_from_earnings(settlement.er_total, state_.decimals());
  std::string account(driver_record_account), wallet(driver_wallet);
  // The pair is all-or-nothing: a duplicate record must not leave a credit behind.
  AccountState saved = state_;
  const std::size_t saved_count = txs_.size();
  try {
    Transaction credit = push(Transaction{TxKind::CreditDriver, account, account, wallet, amount, std::nullopt, 0});
    Transaction store = push(Transaction{TxKind::StoreRecord, account, account, wallet, std::nullopt, record, 0});
    return {std::move(credit), std::move(store)};
  } catch (...) {
    state_ = std::move(saved);
    txs_.resize(saved_count);
    throw;
  }
}

DriverRecord make_record(const DriverProfile& driver, const Settlement& settlement) {
  return DriverRecord{driver.driver_id,
                      settlement.er_total,
                      driver.rank,
                      driver.over_speed_count,
                      settlement.d_in + settlement.d_out,
                      driver.sharp_accel_count,
                      driver.sharp_decel_count,
                      settlement.episode_count,
                      settlement.led_platoon,
                      settlement.earning_date};
}

// ---------------------------------------------------------------------------
// Verification

VerifyResult verify_chain(std::span<const Block> chain, const AccountState* snapshot) {
  VerifyResult result;
  result.blocks = chain.size();
  auto report = [&](std::uint64_t i, std::string field, std::string detail) {
    result.corruption = CorruptionReport{i, std::move(field), std::move(detail)};
    return result;
  };
  if (chain.empty()) return report(0, "encoding", "missing genesis block");

  AccountState state;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const Block& b = chain[i];
    if (b.compute_hash() != b.hash) return report(i, "hash", "stored hash does not match block contents");
    if (b.index != i) return report(i, "index", "block index " + std::to_string(b.index) + " at position " + std::to_string(i));
    Digest expected_prev = i == 0 ? Digest{} : chain[i - 1].hash;
    if (b.prev_hash != expected_prev) return report(i, "prev_hash", "link to previous block broken");
    if (i == 0 && !b.transactions.empty()) return report(i, "transactions", "genesis block carries transactions");
    if (i > 0 && b.transactions.empty()) return report(i, "transactions", "empty block");
    for (std::size_t t = 0; t < b.transactions.size(); ++t) {
      try {
        state.apply(b.transactions[t]);
      } catch (const Error& e) {
        return report(i, "transactions", "transaction " + std::to_string(t) + " fails replay: " + e.what());
      }
    }
    if (state.minted() && state.sum_of_balances() != state.total_supply()) {
      return report(i, "state", "balances do not sum to total supply");
    }
  }
  if (snapshot && !(state == *snapshot)) {
    return report(chain.size() - 1, "state", "replayed state diverges from the stored snapshot");
  }
  return result;
}

namespace {

VerifyResult verify_parsed(const ParsedFile& parsed) {
  VerifyResult chain = verify_chain(parsed.blocks);
  if (parsed.corruption) {
    // Report whichever problem comes first in the chain.
    if (chain.corruption && chain.corruption->block_index < parsed.corruption->block_index) return chain;
    return VerifyResult{parsed.blocks.size(), parsed.corruption};
  }
  return chain;
}

}  // namespace

VerifyResult verify_file(const std::filesystem::path& path) { return verify_parsed(parse_file(read_file(path))); }

// ---------------------------------------------------------------------------
// Ledger

Ledger::Ledger() { chain_.push_back(make_genesis()); }

std::unique_ptr<Ledger> Ledger::open(const std::filesystem::path& path) {
  auto ledger = std::make_unique<Ledger>();
  ledger->path_ = path;
  if (!std::filesystem::exists(path)) {
    append_file(path, encode_record(ledger->chain_.front()));
    return ledger;
  }
  ParsedFile parsed = parse_file(read_file(path));
  VerifyResult v = verify_parsed(parsed);
  if (v.corruption) {
    throw Error(ErrorCode::Corrupt, "ledger '" + path.string() + "' is corrupt at block " +
                                        std::to_string(v.corruption->block_index) + " (" + v.corruption->field +
                                        "): " + v.corruption->detail);
  }
  AccountState state;
  for (const auto& b : parsed.blocks) {
    for (const auto& tx : b.transactions) state.apply(tx);
  }
  ledger->chain_ = std::move(parsed.blocks);
  ledger->state_ = std::move(state);
  return ledger;
}

Block Ledger::append_block(std::vector<Transaction> pending, std::int64_t timestamp) {
  std::unique_lock lock(mutex_);
  if (pending.empty()) throw Error(ErrorCode::ValidationFailed, "refusing to append an empty block");
  AccountState next = state_;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    try {
      next.apply(pending[i]);
    } catch (const Error& e) {
      throw Error(ErrorCode::ValidationFailed, "transaction " + std::to_string(i) + " (" +
                                                   std::string(to_string(pending[i].kind)) + ") rejected: " +
                                                   std::string(platoon::to_string(e.code())) + ": " + e.what());
    }
  }
  Block b;
  b.index = chain_.size();
  b.timestamp = timestamp;
  b.prev_hash = chain_.back().hash;
  b.transactions = std::move(pending);
  b.hash = b.compute_hash();
  if (path_) append_file(*path_, encode_record(b));
  chain_.push_back(b);
  state_ = std::move(next);
  return b;
}

AccountState Ledger::state() const {
  std::shared_lock lock(mutex_);
  return state_;
}

std::vector<Block> Ledger::blocks() const {
  std::shared_lock lock(mutex_);
  return chain_;
}

std::size_t Ledger::height() const {
  std::shared_lock lock(mutex_);
  return chain_.size();
}

TokenAmount Ledger::balance_of(std::string_view account) const {
  std::shared_lock lock(mutex_);
  return state_.balance_of(account);
}

std::vector<DriverRecord> Ledger::records_for(std::string_view driver_id) const {
  std::shared_lock lock(mutex_);
  return state_.records_for(driver_id);
}

VerifyResult Ledger::verify() const {
  std::shared_lock lock(mutex_);
  return verify_chain(chain_, &state_);
}

}  // namespace platoon::ledger
