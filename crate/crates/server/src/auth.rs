//! Passwords and session tokens.
//!
//! Passwords are stored as PBKDF2-HMAC-SHA256 digests with a per-user random
//! salt. Session tokens are 128 random bits, URL-safe base64; only their
//! SHA-256 is ever persisted.

use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine;
use chrono::{DateTime, Utc};
use ideaforge_core::UserId;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::Sha256;

use crate::store::sha256_hex;

pub const PASSWORD_MIN: usize = 8;
pub const PASSWORD_MAX: usize = 1024;
pub const DEFAULT_ROUNDS: u32 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Credential {
    pub user_id: UserId,
    pub salt: String,
    pub hash: String,
    pub rounds: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    /// Hex SHA-256 of the bearer token.
    pub token_hash: String,
    pub user_id: UserId,
    pub expires_at: DateTime<Utc>,
}

impl Session {
    pub fn is_expired(&self, now: DateTime<Utc>) -> bool {
        now >= self.expires_at
    }
}

pub fn derive(password: &str, salt: &[u8], rounds: u32) -> [u8; 32] {
    let mut out = [0u8; 32];
    pbkdf2::pbkdf2_hmac::<Sha256>(password.as_bytes(), salt, rounds, &mut out);
    out
}

fn ct_eq(a: &[u8], b: &[u8]) -> bool {
    a.len() == b.len() && a.iter().zip(b).fold(0u8, |acc, (x, y)| acc | (x ^ y)) == 0
}

pub fn token_hash(token: &str) -> String {
    sha256_hex(token.as_bytes())
}

/// Source of salts and tokens. Seeded from the OS unless a seed is injected.
#[derive(Debug)]
pub struct Secrets {
    rng: ChaCha20Rng,
}

impl Secrets {
    pub fn new(seed: Option<u64>) -> Self {
        let rng = match seed {
            Some(s) => ChaCha20Rng::seed_from_u64(s),
            None => ChaCha20Rng::from_os_rng(),
        };
        Secrets { rng }
    }

    fn bytes16(&mut self) -> [u8; 16] {
        let mut b = [0u8; 16];
        self.rng.fill_bytes(&mut b);
        b
    }

    pub fn token(&mut self) -> String {
        URL_SAFE_NO_PAD.encode(self.bytes16())
    }

    pub fn credential(&mut self, user_id: UserId, password: &str, rounds: u32) -> Credential {
        let salt = self.bytes16();
        Credential {
            user_id,
            salt: URL_SAFE_NO_PAD.encode(salt),
            hash: URL_SAFE_NO_PAD.encode(derive(password, &salt, rounds)),
            rounds,
        }
    }
}

impl Credential {
    pub fn verify(&self, password: &str) -> bool {
        let (Ok(salt), Ok(hash)) = (URL_SAFE_NO_PAD.decode(&self.salt), URL_SAFE_NO_PAD.decode(&self.hash)) else {
            return false;
        };
        ct_eq(&derive(password, &salt, self.rounds), &hash)
    }
}
