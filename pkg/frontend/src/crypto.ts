// In-browser cryptography for the voting client: ElGamal over a Schnorr
// subgroup, Schnorr signatures, trapdoor tracker commitments, and the
// bulletin-board hash chain. All byte layouts match the server's canonical
// encoding bit-exactly (minimal big-endian integers with a 4-byte length
// prefix), so hashes and signatures interoperate.

export interface Group {
  p: bigint;
  q: bigint;
  g: bigint;
}

// Small test group: quadratic residues mod 23, order 11.
export const TEST: Group = { p: 23n, q: 11n, g: 2n };

// Production group: the standard 2048-bit safe-prime MODP group with
// generator 2 and q = (p-1)/2.
const PROD_P = BigInt(
  "0xffffffffffffffffc90fdaa22168c234c4c6628b80dc1cd129024e088a67cc74" +
    "020bbea63b139b22514a08798e3404ddef9519b3cd3a431b302b0a6df25f1437" +
    "4fe1356d6d51c245e485b576625e7ec6f44c42e9a637ed6b0bff5cb6f406b7ed" +
    "ee386bfb5a899fa5ae9f24117c4b1fe649286651ece45b3dc2007cb8a163bf05" +
    "98da48361c55d39a69163fa8fd24cf5f83655d23dca3ad961c62f356208552bb" +
    "9ed529077096966d670c354e4abc9804f1746c08ca18217c32905e462e36ce3b" +
    "e39e772c180e86039b2783a2ec07a28fb5c55df06f4c52c9de2bcbf695581718" +
    "3995497cea956ae515d2261898fa051015728e5a8aacaa68ffffffffffffffff",
);
export const PROD: Group = { p: PROD_P, q: (PROD_P - 1n) / 2n, g: 2n };

export function groupProfile(name: string): Group {
  if (name === "TEST") return TEST;
  if (name === "PROD") return PROD;
  throw new Error(`unknown group profile ${name}`);
}

export function modPow(base: bigint, exp: bigint, mod: bigint): bigint {
  let result = 1n;
  let b = ((base % mod) + mod) % mod;
  let e = exp;
  while (e > 0n) {
    if (e & 1n) result = (result * b) % mod;
    b = (b * b) % mod;
    e >>= 1n;
  }
  return result;
}

// p and q are prime, so Fermat inversion is fine.
export function modInv(a: bigint, prime: bigint): bigint {
  return modPow(a, prime - 2n, prime);
}

export function gexp(group: Group, n: bigint): bigint {
  return modPow(group.g, n, group.p);
}

export function isMember(group: Group, e: bigint): boolean {
  return e > 0n && e < group.p && modPow(e, group.q, group.p) === 1n;
}

// ---- canonical byte encoding -----------------------------------------------

export function intBytes(n: bigint): Uint8Array {
  if (n < 0n) throw new Error("negative integer has no canonical encoding");
  if (n === 0n) return new Uint8Array(0);
  let hex = n.toString(16);
  if (hex.length % 2) hex = "0" + hex;
  return hexToBytes(hex);
}

export function lengthPrefix(b: Uint8Array): Uint8Array {
  const out = new Uint8Array(4 + b.length);
  new DataView(out.buffer).setUint32(0, b.length, false);
  out.set(b, 4);
  return out;
}

export type CanonPart = bigint | string | Uint8Array;

export function canon(...parts: CanonPart[]): Uint8Array {
  const chunks = parts.map((part) => {
    if (typeof part === "bigint") return lengthPrefix(intBytes(part));
    if (typeof part === "string") return lengthPrefix(new TextEncoder().encode(part));
    return lengthPrefix(part);
  });
  const total = chunks.reduce((n, c) => n + c.length, 0);
  const out = new Uint8Array(total);
  let offset = 0;
  for (const c of chunks) {
    out.set(c, offset);
    offset += c.length;
  }
  return out;
}

export async function sha256(data: Uint8Array): Promise<Uint8Array> {
  const digest = await crypto.subtle.digest("SHA-256", data as BufferSource);
  return new Uint8Array(digest);
}

export async function hashToScalar(q: bigint, ...parts: CanonPart[]): Promise<bigint> {
  const digest = await sha256(canon(...parts));
  return bytesToBig(digest) % q;
}

export function hexToBytes(hex: string): Uint8Array {
  const out = new Uint8Array(hex.length / 2);
  for (let i = 0; i < out.length; i++) {
    out[i] = parseInt(hex.slice(2 * i, 2 * i + 2), 16);
  }
  return out;
}

export function bytesToHex(b: Uint8Array): string {
  return Array.from(b, (x) => x.toString(16).padStart(2, "0")).join("");
}

export function bytesToBig(b: Uint8Array): bigint {
  let n = 0n;
  for (const byte of b) n = (n << 8n) | BigInt(byte);
  return n;
}

// The wire carries group elements as minimal big-endian hex; zero is "00".
export function bigToHex(n: bigint): string {
  const hex = bytesToHex(intBytes(n));
  return hex === "" ? "00" : hex;
}

export function hexToBig(hex: string): bigint {
  return bytesToBig(hexToBytes(hex));
}

// ---- ElGamal ----------------------------------------------------------------

export interface Ciphertext {
  alpha: bigint;
  beta: bigint;
}

export function encrypt(group: Group, pk: bigint, m: bigint, r: bigint): Ciphertext {
  if (!isMember(group, m)) throw new Error("plaintext is not a subgroup member");
  return {
    alpha: gexp(group, r),
    beta: (m * modPow(pk, r, group.p)) % group.p,
  };
}

export function decrypt(group: Group, sk: bigint, ct: Ciphertext): bigint {
  return (ct.beta * modInv(modPow(ct.alpha, sk, group.p), group.p)) % group.p;
}

// ---- Schnorr signatures -------------------------------------------------------

export interface Signature {
  commit: bigint;
  response: bigint;
}

export async function sign(
  group: Group,
  sk: bigint,
  message: Uint8Array,
  nonce: bigint,
): Promise<Signature> {
  const commit = gexp(group, nonce);
  const pk = gexp(group, sk);
  const c = await hashToScalar(group.q, group.g, pk, commit, message);
  return { commit, response: (nonce + sk * c) % group.q };
}

export async function verifySig(
  group: Group,
  pk: bigint,
  message: Uint8Array,
  sig: Signature,
): Promise<boolean> {
  if (!isMember(group, sig.commit)) return false;
  if (sig.response < 0n || sig.response >= group.q) return false;
  const c = await hashToScalar(group.q, group.g, pk, sig.commit, message);
  return gexp(group, sig.response) === (sig.commit * modPow(pk, c, group.p)) % group.p;
}

export function ballotMessage(electionId: string, voterId: string, ct: Ciphertext): Uint8Array {
  return canon(electionId, voterId, ct.alpha, ct.beta);
}

export function candidateEncoding(group: Group, candidateIds: string[]): Map<string, bigint> {
  return new Map(candidateIds.map((cid, i) => [cid, gexp(group, BigInt(i))]));
}

// ---- trackers ------------------------------------------------------------------

// Crockford base-32: no I, L, O, U.
const B32_ALPHABET = "0123456789ABCDEFGHJKMNPQRSTVWXYZ";

export function trackerDisplay(value: bigint): string {
  if (value < 0n) throw new Error("tracker value must be non-negative");
  if (value === 0n) return "0";
  let v = value;
  let out = "";
  while (v > 0n) {
    out = B32_ALPHABET[Number(v % 32n)] + out;
    v /= 32n;
  }
  return out;
}

export function trackerParse(display: string): bigint {
  let value = 0n;
  for (const c of display.toUpperCase()) {
    const d = B32_ALPHABET.indexOf(c);
    if (d < 0) throw new Error(`invalid tracker character ${c}`);
    value = value * 32n + BigInt(d);
  }
  return value;
}

// A tracker n is committed as beta = g^n * h^r with h the voter's trapdoor
// key; the genuine opening is alpha = g^r.
export function openCommitment(
  group: Group,
  beta: bigint,
  alpha: bigint,
  trapdoorSk: bigint,
  pool: bigint[],
): bigint | null {
  const encoded = (beta * modInv(modPow(alpha, trapdoorSk, group.p), group.p)) % group.p;
  for (const n of pool) {
    if (gexp(group, n) === encoded) return n;
  }
  return null;
}

// The trapdoor holder can forge alpha' = (beta / g^n')^(1/sk) opening the
// same beta to any pool tracker n'.
export function fakeAlpha(group: Group, beta: bigint, fakeN: bigint, trapdoorSk: bigint): bigint {
  const skInv = modInv(trapdoorSk, group.q);
  const shifted = (beta * modInv(gexp(group, fakeN), group.p)) % group.p;
  return modPow(shifted, skInv, group.p);
}

export function assembleAlpha(group: Group, shares: bigint[]): bigint {
  return shares.reduce((acc, s) => (acc * s) % group.p, 1n);
}

// ---- bulletin-board hash chain ---------------------------------------------------

export interface BoardEntry {
  index: number;
  kind: string;
  payload: string; // hex
  prev_hash: string; // hex
  entry_hash: string; // hex
}

export const GENESIS_PREV = "0".repeat(64);
export const KINDS = ["Setup", "Ballot", "Result", "Proof"];

export async function entryHash(
  prevHash: Uint8Array,
  index: number,
  kind: string,
  payload: Uint8Array,
): Promise<Uint8Array> {
  const be8 = new Uint8Array(8);
  new DataView(be8.buffer).setBigUint64(0, BigInt(index), false);
  const kindBytes = new TextEncoder().encode(kind);
  const data = new Uint8Array(
    prevHash.length + 8 + 4 + kindBytes.length + 4 + payload.length,
  );
  let offset = 0;
  for (const part of [prevHash, be8, lengthPrefix(kindBytes), lengthPrefix(payload)]) {
    data.set(part, offset);
    offset += part.length;
  }
  return sha256(data);
}

export interface ChainCheck {
  ok: boolean;
  firstBad: number | null;
}

export async function verifyChain(entries: BoardEntry[]): Promise<ChainCheck> {
  let prev = GENESIS_PREV;
  for (let i = 0; i < entries.length; i++) {
    const e = entries[i]!;
    if (e.index !== i || e.prev_hash !== prev || !KINDS.includes(e.kind)) {
      return { ok: false, firstBad: i };
    }
    const expected = await entryHash(hexToBytes(prev), i, e.kind, hexToBytes(e.payload));
    if (bytesToHex(expected) !== e.entry_hash) return { ok: false, firstBad: i };
    prev = e.entry_hash;
  }
  return { ok: true, firstBad: null };
}
