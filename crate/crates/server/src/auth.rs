//! API tokens: random secrets handed out once, stored only as SHA-256 hashes.

use rand::RngCore;
use sha2::{Digest, Sha256};
use smartreview::store::Account;
use smartreview::GraphStore;
use subtle::ConstantTimeEq;

/// 256 bits of randomness, hex-encoded.
pub fn new_token() -> String {
    let mut bytes = [0u8; 32];
    rand::rng().fill_bytes(&mut bytes);
    hex::encode(bytes)
}

pub fn hash_token(token: &str) -> String {
    hex::encode(Sha256::digest(token.as_bytes()))
}

/// Registers `display_name` and returns the account with its fresh token.
pub fn register(store: &mut GraphStore, display_name: &str) -> smartreview::Result<(Account, String)> {
    let token = new_token();
    let account = store.register_account(display_name, Some(hash_token(&token)))?;
    Ok((account, token))
}

/// The user the token belongs to. Every stored hash is compared in
/// constant time and the scan never stops early.
pub fn authenticate(store: &GraphStore, token: &str) -> Option<String> {
    let presented = hash_token(token);
    let mut found = None;
    for account in store.accounts() {
        let Some(stored) = account.token_hash.as_deref() else {
            continue;
        };
        if stored.len() == presented.len() && bool::from(stored.as_bytes().ct_eq(presented.as_bytes())) {
            found = Some(account.user_id.clone());
        }
    }
    found
}

/// Extracts the token from an `Authorization: Bearer <token>` value.
pub fn bearer(header: &str) -> Option<&str> {
    let (scheme, token) = header.trim().split_once(' ')?;
    let token = token.trim();
    (scheme.eq_ignore_ascii_case("bearer") && !token.is_empty()).then_some(token)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn register_then_authenticate() {
        let mut store = GraphStore::in_memory();
        let (ada, ada_token) = register(&mut store, "Ada").unwrap();
        let (bob, bob_token) = register(&mut store, "Bob").unwrap();
        assert_ne!(ada.user_id, bob.user_id);
        assert_ne!(ada_token, bob_token);
        assert_eq!(ada_token.len(), 64);
        assert_eq!(authenticate(&store, &ada_token), Some(ada.user_id));
        assert_eq!(authenticate(&store, &bob_token), Some(bob.user_id));
        assert_eq!(authenticate(&store, "garbage"), None);
        assert_eq!(authenticate(&store, ""), None);
        // Only the hash is kept.
        assert!(store
            .accounts()
            .all(|a| a.token_hash.as_deref() != Some(ada_token.as_str())));
    }

    #[test]
    fn accounts_without_tokens_never_match() {
        let mut store = GraphStore::in_memory();
        store.register_account("Fixture editor", None).unwrap();
        assert_eq!(authenticate(&store, ""), None);
        assert_eq!(authenticate(&store, &hash_token("")), None);
    }

    #[test]
    fn bearer_header() {
        assert_eq!(bearer("Bearer abc"), Some("abc"));
        assert_eq!(bearer("bearer  abc "), Some("abc"));
        assert_eq!(bearer("Basic abc"), None);
        assert_eq!(bearer("Bearer"), None);
        assert_eq!(bearer("Bearer "), None);
    }
}
