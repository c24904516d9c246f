#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace uljam {

using Bytes = std::vector<uint8_t>;

/// RSA key pair for signing system information. Private side optional
/// (verifiers hold only the public key).
class OperatorKeyPair
{
public:
  OperatorKeyPair() = default;

  /// Generates a fresh pair; modulus_bits defaults to 2048.
  static OperatorKeyPair generate(int modulus_bits = 2048);

  static OperatorKeyPair from_pem_files(const std::string& private_path,
                                        const std::string& public_path);
  static OperatorKeyPair public_from_pem_file(const std::string& public_path);

  bool has_private() const { return priv_ != nullptr; }
  bool has_public() const { return pub_ != nullptr; }

  void* private_handle() const { return priv_.get(); }
  void* public_handle() const { return pub_.get(); }

private:
  std::shared_ptr<void> priv_;  // EVP_PKEY, type-erased to keep OpenSSL out of headers
  std::shared_ptr<void> pub_;
};

/// MIB plus scheduled SIBs plus the signature carried in a dedicated
/// SIB. SIB ordering is part of the signed content.
struct SystemInfoBroadcast {
  Bytes mib;
  std::vector<Bytes> sibs;
  std::optional<Bytes> signature;
};

enum class CellVerdict : uint8_t { Verified, Malicious };

/// Cell settings a UE tentatively applies while verifying.
struct CellSettings {
  bool cell_barred = false;
  bool intra_freq_reselection = false;
  uint16_t cell_id = 0;
  double signal_metric = 0.0;
};

/// Digest input: mib || len32be(sib_1) || sib_1 || ... (SHA-256).
Bytes si_digest(const Bytes& mib, const std::vector<Bytes>& sibs);

/// PKCS#1 v1.5 RSA signature over the SHA-256 digest of the
/// concatenated system information. Deterministic for a fixed key.
Bytes sign_si(const Bytes& mib, const std::vector<Bytes>& sibs, const OperatorKeyPair& key);

struct VerifyOutcome {
  CellVerdict verdict = CellVerdict::Malicious;
  /// Committed settings on Verified; the pre-tentative settings
  /// (rollback) on Malicious.
  CellSettings settings;
};

/// Tentatively applied settings are committed only if the signature
/// verifies; a missing signature SIB is treated as Malicious
/// (fail-closed).
VerifyOutcome verify_and_commit(const SystemInfoBroadcast& broadcast,
                                const OperatorKeyPair& key,
                                const CellSettings& tentative,
                                const CellSettings& previous = CellSettings{});

struct CellCandidate {
  SystemInfoBroadcast broadcast;
  CellSettings claimed;
};

/// Picks the Verified candidate with the highest signal metric (ties
/// broken by lowest cell id), honouring barring flags only from
/// Verified cells. With verification disabled every claimed setting is
/// trusted, which is exactly what barring spoofing exploits.
std::optional<CellSettings> cell_select(const std::vector<CellCandidate>& candidates,
                                        const OperatorKeyPair& key,
                                        bool verify_enabled = true);

// Corpus record for the on-disk test format: hex mib, hex sibs,
// hex signature, expected verdict.
struct SibCorpusRecord {
  Bytes mib;
  std::vector<Bytes> sibs;
  std::optional<Bytes> signature;
  CellVerdict expected = CellVerdict::Malicious;
};

std::vector<SibCorpusRecord> load_sib_corpus(const std::string& path);

/// Runs every record through verify_and_commit; returns the number of
/// records whose verdict does not match the expectation.
int run_sib_corpus(const std::vector<SibCorpusRecord>& corpus, const OperatorKeyPair& key);

} // namespace uljam
