#include "uljam/sib_auth.hpp"

#include <openssl/evp.h>
#include <openssl/pem.h>
#include <openssl/rsa.h>
#include <openssl/sha.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace uljam {

namespace {

void pkey_deleter(void* p)
{
  EVP_PKEY_free(static_cast<EVP_PKEY*>(p));
}

std::shared_ptr<void> wrap(EVP_PKEY* key)
{
  return std::shared_ptr<void>(key, pkey_deleter);
}

EVP_PKEY* as_pkey(void* p) { return static_cast<EVP_PKEY*>(p); }

[[noreturn]] void fail(const std::string& what)
{
  throw std::runtime_error("sib_auth: " + what);
}

} // namespace

OperatorKeyPair OperatorKeyPair::generate(int modulus_bits)
{
  EVP_PKEY* key = EVP_RSA_gen(static_cast<unsigned>(modulus_bits));
  if (!key) {
    fail("RSA key generation failed");
  }
  OperatorKeyPair pair;
  pair.priv_ = wrap(key);
  EVP_PKEY_up_ref(key);
  pair.pub_ = wrap(key);
  return pair;
}

OperatorKeyPair OperatorKeyPair::from_pem_files(const std::string& private_path,
                                                const std::string& public_path)
{
  OperatorKeyPair pair = public_from_pem_file(public_path);
  FILE* f = std::fopen(private_path.c_str(), "r");
  if (!f) {
    fail("cannot open private key: " + private_path);
  }
  EVP_PKEY* priv = PEM_read_PrivateKey(f, nullptr, nullptr, nullptr);
  std::fclose(f);
  if (!priv) {
    fail("cannot parse private key: " + private_path);
  }
  pair.priv_ = wrap(priv);
  return pair;
}

OperatorKeyPair OperatorKeyPair::public_from_pem_file(const std::string& public_path)
{
  FILE* f = std::fopen(public_path.c_str(), "r");
  if (!f) {
    fail("cannot open public key: " + public_path);
  }
  EVP_PKEY* pub = PEM_read_PUBKEY(f, nullptr, nullptr, nullptr);
  std::fclose(f);
  if (!pub) {
    fail("cannot parse public key: " + public_path);
  }
  OperatorKeyPair pair;
  pair.pub_ = wrap(pub);
  return pair;
}

Bytes si_digest(const Bytes& mib, const std::vector<Bytes>& sibs)
{
  Bytes input;
  input.insert(input.end(), mib.begin(), mib.end());
  for (const Bytes& sib : sibs) {
    const uint32_t len = static_cast<uint32_t>(sib.size());
    input.push_back(static_cast<uint8_t>(len >> 24));
    input.push_back(static_cast<uint8_t>(len >> 16));
    input.push_back(static_cast<uint8_t>(len >> 8));
    input.push_back(static_cast<uint8_t>(len));
    input.insert(input.end(), sib.begin(), sib.end());
  }
  Bytes digest(SHA256_DIGEST_LENGTH);
  SHA256(input.data(), input.size(), digest.data());
  return digest;
}

Bytes sign_si(const Bytes& mib, const std::vector<Bytes>& sibs, const OperatorKeyPair& key)
{
  if (!key.has_private()) {
    fail("sign_si requires a private key");
  }
  const Bytes digest = si_digest(mib, sibs);

  EVP_PKEY_CTX* ctx = EVP_PKEY_CTX_new(as_pkey(key.private_handle()), nullptr);
  if (!ctx) {
    fail("EVP_PKEY_CTX_new failed");
  }
  Bytes sig;
  size_t sig_len = 0;
  bool ok = EVP_PKEY_sign_init(ctx) == 1 &&
            EVP_PKEY_CTX_set_rsa_padding(ctx, RSA_PKCS1_PADDING) == 1 &&
            EVP_PKEY_CTX_set_signature_md(ctx, EVP_sha256()) == 1 &&
            EVP_PKEY_sign(ctx, nullptr, &sig_len, digest.data(), digest.size()) == 1;
  if (ok) {
    sig.resize(sig_len);
    ok = EVP_PKEY_sign(ctx, sig.data(), &sig_len, digest.data(), digest.size()) == 1;
    sig.resize(sig_len);
  }
  EVP_PKEY_CTX_free(ctx);
  if (!ok) {
    fail("RSA signing failed");
  }
  return sig;
}

static bool verify_signature(const Bytes& digest, const Bytes& signature,
                             const OperatorKeyPair& key)
{
  if (!key.has_public()) {
    fail("verification requires a public key");
  }
  EVP_PKEY_CTX* ctx = EVP_PKEY_CTX_new(as_pkey(key.public_handle()), nullptr);
  if (!ctx) {
    fail("EVP_PKEY_CTX_new failed");
  }
  const bool ok = EVP_PKEY_verify_init(ctx) == 1 &&
                  EVP_PKEY_CTX_set_rsa_padding(ctx, RSA_PKCS1_PADDING) == 1 &&
                  EVP_PKEY_CTX_set_signature_md(ctx, EVP_sha256()) == 1 &&
                  EVP_PKEY_verify(ctx, signature.data(), signature.size(),
                                  digest.data(), digest.size()) == 1;
  EVP_PKEY_CTX_free(ctx);
  return ok;
}

VerifyOutcome verify_and_commit(const SystemInfoBroadcast& broadcast,
                                const OperatorKeyPair& key,
                                const CellSettings& tentative,
                                const CellSettings& previous)
{
  VerifyOutcome out;
  if (!broadcast.signature.has_value()) {
    out.verdict = CellVerdict::Malicious;
    out.settings = previous;  // rollback
    return out;
  }
  const Bytes digest = si_digest(broadcast.mib, broadcast.sibs);
  if (verify_signature(digest, *broadcast.signature, key)) {
    out.verdict = CellVerdict::Verified;
    out.settings = tentative;  // commit
  } else {
    out.verdict = CellVerdict::Malicious;
    out.settings = previous;  // rollback
  }
  return out;
}

std::optional<CellSettings> cell_select(const std::vector<CellCandidate>& candidates,
                                        const OperatorKeyPair& key,
                                        bool verify_enabled)
{
  // Several broadcasts may describe the same physical cell (a rogue
  // re-broadcast alongside the genuine one). Barring from any trusted
  // version bars the cell; untrusted versions carry no weight at all.
  std::vector<bool> trusted(candidates.size(), true);
  if (verify_enabled) {
    for (size_t i = 0; i < candidates.size(); ++i) {
      const VerifyOutcome out = verify_and_commit(candidates[i].broadcast, key,
                                                  candidates[i].claimed);
      trusted[i] = out.verdict == CellVerdict::Verified;
    }
  }
  std::set<uint16_t> barred;
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (trusted[i] && candidates[i].claimed.cell_barred) {
      barred.insert(candidates[i].claimed.cell_id);
    }
  }
  std::optional<CellSettings> best;
  for (size_t i = 0; i < candidates.size(); ++i) {
    const CellSettings& s = candidates[i].claimed;
    if (!trusted[i] || barred.count(s.cell_id)) {
      continue;
    }
    if (!best || s.signal_metric > best->signal_metric ||
        (s.signal_metric == best->signal_metric && s.cell_id < best->cell_id)) {
      best = s;
    }
  }
  return best;
}

// --- corpus IO --------------------------------------------------------------

static Bytes parse_hex(const std::string& hex)
{
  if (hex == "-") {
    return {};
  }
  if (hex.size() % 2 != 0) {
    fail("corpus: odd-length hex string");
  }
  Bytes out(hex.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<uint8_t>(std::stoi(hex.substr(2 * i, 2), nullptr, 16));
  }
  return out;
}

std::vector<SibCorpusRecord> load_sib_corpus(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    fail("cannot open corpus: " + path);
  }
  std::vector<SibCorpusRecord> corpus;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::istringstream ls(line);
    std::string mib_hex, sibs_field, sig_hex, expect;
    if (!(ls >> mib_hex >> sibs_field >> sig_hex >> expect)) {
      fail("corpus: malformed record");
    }
    SibCorpusRecord rec;
    rec.mib = parse_hex(mib_hex);
    std::istringstream ss(sibs_field);
    std::string sib_hex;
    while (std::getline(ss, sib_hex, ',')) {
      rec.sibs.push_back(parse_hex(sib_hex));
    }
    if (sig_hex != "-") {
      rec.signature = parse_hex(sig_hex);
    }
    if (expect == "verified") {
      rec.expected = CellVerdict::Verified;
    } else if (expect == "malicious") {
      rec.expected = CellVerdict::Malicious;
    } else {
      fail("corpus: unknown verdict '" + expect + "'");
    }
    corpus.push_back(std::move(rec));
  }
  return corpus;
}

int run_sib_corpus(const std::vector<SibCorpusRecord>& corpus, const OperatorKeyPair& key)
{
  int mismatches = 0;
  for (const SibCorpusRecord& rec : corpus) {
    SystemInfoBroadcast b{rec.mib, rec.sibs, rec.signature};
    const VerifyOutcome out = verify_and_commit(b, key, CellSettings{});
    if (out.verdict != rec.expected) {
      ++mismatches;
    }
  }
  return mismatches;
}

} // namespace uljam
