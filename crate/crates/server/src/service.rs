//! The platform made durable: every mutation is written to the store as one
//! batch before it is acknowledged.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use chrono::Duration;
use ideaforge_core::platform::EntityKey;
use ideaforge_core::{Clock, GroupId, NewUser, Platform, PlatformConfig, UserAccount, UserId};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::auth::{self, Credential, Secrets, Session, PASSWORD_MAX, PASSWORD_MIN};
use crate::store::{Op, Store, StoreError};

const CREDENTIAL: &str = "credential";
const SESSION: &str = "session";

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error(transparent)]
    Domain(#[from] ideaforge_core::Error),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("authentication required")]
    Unauthenticated,
    #[error("session token is invalid or expired")]
    InvalidSession,
    #[error("email or password is incorrect")]
    BadCredentials,
    #[error("password must be {PASSWORD_MIN} to {PASSWORD_MAX} characters")]
    WeakPassword,
    #[error("version conflict: expected {expected}, current {actual}")]
    VersionConflict { expected: u64, actual: u64 },
    #[error("store unavailable after a failed write; restart the service")]
    Unavailable,
}

pub type ServiceResult<T> = Result<T, ServiceError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuthSettings {
    pub session_ttl: Duration,
    pub password_rounds: u32,
}

impl Default for AuthSettings {
    fn default() -> Self {
        AuthSettings { session_ttl: Duration::hours(24), password_rounds: auth::DEFAULT_ROUNDS }
    }
}

pub struct Service {
    platform: Platform,
    store: Store,
    credentials: BTreeMap<UserId, Credential>,
    sessions: BTreeMap<String, Session>,
    secrets: Secrets,
    settings: AuthSettings,
    staged: Vec<Op>,
    poisoned: bool,
}

impl std::fmt::Debug for Service {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Service")
            .field("platform", &self.platform)
            .field("records", &self.store.len())
            .field("sessions", &self.sessions.len())
            .finish_non_exhaustive()
    }
}

fn parse<T: DeserializeOwned>(kind: &str, v: &serde_json::Value) -> ServiceResult<T> {
    serde_json::from_value(v.clone())
        .map_err(|e| ideaforge_core::Error::CorruptRecord(format!("{kind}: {e}")).into())
}

impl Service {
    /// Opens the store in `dir`, rebuilds the platform from it and seeds the
    /// default groups on first run.
    pub fn open(
        dir: impl AsRef<Path>,
        config: PlatformConfig,
        settings: AuthSettings,
        clock: Arc<dyn Clock>,
        secret_seed: Option<u64>,
    ) -> ServiceResult<Self> {
        let store = Store::open(dir)?;
        let mut records = Vec::new();
        let mut credentials = BTreeMap::new();
        let mut sessions = BTreeMap::new();
        for r in store.records() {
            match r.kind.as_str() {
                CREDENTIAL => {
                    let c: Credential = parse(CREDENTIAL, &r.payload)?;
                    credentials.insert(c.user_id, c);
                }
                SESSION => {
                    let s: Session = parse(SESSION, &r.payload)?;
                    sessions.insert(s.token_hash.clone(), s);
                }
                _ => records.push((r.kind.clone(), r.payload.clone())),
            }
        }
        let platform = Platform::restore(config, clock, records)?;
        let mut svc = Service {
            platform,
            store,
            credentials,
            sessions,
            secrets: Secrets::new(secret_seed),
            settings,
            staged: Vec::new(),
            poisoned: false,
        };
        svc.persist()?;
        Ok(svc)
    }

    pub fn platform(&self) -> &Platform {
        &self.platform
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn settings(&self) -> AuthSettings {
        self.settings
    }

    fn stage<T: Serialize>(&mut self, kind: &str, id: String, value: Option<&T>) {
        let expected = self.store.version(kind, &id);
        let op = match value {
            Some(v) => Op::Put {
                kind: kind.to_owned(),
                id,
                expected,
                payload: serde_json::to_value(v).expect("records serialize"),
            },
            None => Op::Delete { kind: kind.to_owned(), id, expected },
        };
        self.staged.push(op);
    }

    /// Commits staged auxiliary records plus every entity the platform touched.
    fn persist(&mut self) -> ServiceResult<()> {
        let mut ops = std::mem::take(&mut self.staged);
        for key in self.platform.take_changes() {
            let (kind, id) = (key.kind(), key.id());
            let expected = self.store.version(kind, &id);
            match self.platform.record(key) {
                Some(payload) => ops.push(Op::Put { kind: kind.to_owned(), id, expected, payload }),
                None if expected > 0 => ops.push(Op::Delete { kind: kind.to_owned(), id, expected }),
                None => {}
            }
        }
        if let Err(e) = self.store.commit(ops) {
            self.poisoned = true;
            return Err(e.into());
        }
        Ok(())
    }

    fn writable(&self) -> ServiceResult<()> {
        if self.poisoned {
            Err(ServiceError::Unavailable)
        } else {
            Ok(())
        }
    }

    /// Runs one platform operation and makes its effects durable.
    pub fn mutate<T>(
        &mut self,
        op: impl FnOnce(&mut Platform) -> ideaforge_core::Result<T>,
    ) -> ServiceResult<T> {
        self.writable()?;
        let out = op(&mut self.platform);
        self.persist()?;
        Ok(out?)
    }

    /// Current store version of an entity; 0 when absent.
    pub fn version_of(&self, key: EntityKey) -> u64 {
        self.store.version(key.kind(), &key.id())
    }

    /// Optimistic concurrency check against a client-supplied version.
    pub fn expect_version(&self, key: EntityKey, expected: Option<u64>) -> ServiceResult<()> {
        match expected {
            Some(e) if e != self.version_of(key) => {
                Err(ServiceError::VersionConflict { expected: e, actual: self.version_of(key) })
            }
            _ => Ok(()),
        }
    }

    fn check_password(password: &str) -> ServiceResult<()> {
        let n = password.chars().count();
        if (PASSWORD_MIN..=PASSWORD_MAX).contains(&n) {
            Ok(())
        } else {
            Err(ServiceError::WeakPassword)
        }
    }

    fn create_account(&mut self, new: NewUser, password: &str, group: GroupId) -> ServiceResult<UserAccount> {
        self.writable()?;
        Self::check_password(password)?;
        let user = match self.platform.register_user_in_group(new, group) {
            Ok(u) => u,
            Err(e) => {
                self.persist()?;
                return Err(e.into());
            }
        };
        let cred = self.secrets.credential(user.user_id, password, self.settings.password_rounds);
        self.stage(CREDENTIAL, user.user_id.to_string(), Some(&cred));
        self.credentials.insert(user.user_id, cred);
        self.persist()?;
        Ok(user)
    }

    /// Self-service sign-up; new accounts join the Visitors group.
    pub fn register(&mut self, new: NewUser, password: &str) -> ServiceResult<UserAccount> {
        self.create_account(new, password, GroupId::VISITORS)
    }

    /// Creates the Administrator account unless one with this email exists.
    /// Returns the account and whether it was created.
    pub fn ensure_admin(
        &mut self,
        email: &str,
        display_name: &str,
        password: &str,
    ) -> ServiceResult<(UserAccount, bool)> {
        if let Some(u) = self.platform.find_user_by_email(email) {
            return Ok((u.clone(), false));
        }
        let new = NewUser { display_name: display_name.to_owned(), email: email.to_owned(), interest_tags: vec![] };
        Ok((self.create_account(new, password, GroupId::ADMINISTRATORS)?, true))
    }

    /// The stored credential for an email, for verification outside any lock.
    pub fn credential_for(&self, email: &str) -> Option<Credential> {
        let user = self.platform.find_user_by_email(email)?;
        self.credentials.get(&user.user_id).cloned()
    }

    /// Issues a session for an already-verified user. Expired sessions are
    /// purged in the same batch.
    pub fn open_session(&mut self, user: UserId) -> ServiceResult<(String, Session)> {
        self.writable()?;
        self.platform.user(user)?;
        let now = self.platform.now();
        let expired: Vec<String> =
            self.sessions.values().filter(|s| s.is_expired(now)).map(|s| s.token_hash.clone()).collect();
        for h in expired {
            self.sessions.remove(&h);
            self.stage::<Session>(SESSION, h, None);
        }
        let token = self.secrets.token();
        let session = Session { token_hash: auth::token_hash(&token), user_id: user, expires_at: now + self.settings.session_ttl };
        self.stage(SESSION, session.token_hash.clone(), Some(&session));
        self.sessions.insert(session.token_hash.clone(), session.clone());
        self.persist()?;
        Ok((token, session))
    }

    /// Verifies a password and opens a session in one step.
    pub fn login(&mut self, email: &str, password: &str) -> ServiceResult<(String, Session)> {
        let cred = self.credential_for(email);
        match cred {
            Some(c) if c.verify(password) => self.open_session(c.user_id),
            _ => Err(ServiceError::BadCredentials),
        }
    }

    pub fn authenticate(&self, token: &str) -> ServiceResult<UserId> {
        let s = self.sessions.get(&auth::token_hash(token)).ok_or(ServiceError::InvalidSession)?;
        if s.is_expired(self.platform.now()) || self.platform.user(s.user_id).is_err() {
            return Err(ServiceError::InvalidSession);
        }
        Ok(s.user_id)
    }

    pub fn logout(&mut self, token: &str) -> ServiceResult<()> {
        self.writable()?;
        let h = auth::token_hash(token);
        if self.sessions.remove(&h).is_none() {
            return Err(ServiceError::InvalidSession);
        }
        self.stage::<Session>(SESSION, h, None);
        self.persist()
    }

    /// Full state as JSON lines sorted by (kind, id).
    pub fn export(&self) -> String {
        self.store.export()
    }

    pub fn checkpoint(&mut self) -> ServiceResult<()> {
        self.store.checkpoint().map_err(Into::into)
    }
}
