use std::collections::HashMap;
use std::time::{Duration, Instant};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CartSession {
    pub cart_id: String,
    /// Ordered, duplicate free.
    pub items: Vec<String>,
    pub created_at: DateTime<Utc>,
}

impl CartSession {
    /// Appends `id` unless present; returns whether the cart changed.
    pub fn add(&mut self, id: &str) -> bool {
        if self.items.iter().any(|i| i == id) {
            return false;
        }
        self.items.push(id.to_string());
        true
    }

    pub fn remove(&mut self, id: &str) -> bool {
        let before = self.items.len();
        self.items.retain(|i| i != id);
        before != self.items.len()
    }
}

/// In-memory sessions that expire `ttl` after their last use.
#[derive(Debug)]
pub struct Carts {
    ttl: Duration,
    sessions: HashMap<String, (Instant, CartSession)>,
}

impl Carts {
    pub fn new(ttl: Duration) -> Self {
        Carts {
            ttl,
            sessions: HashMap::new(),
        }
    }

    fn purge(&mut self, now: Instant) {
        let ttl = self.ttl;
        self.sessions.retain(|_, (used, _)| now.duration_since(*used) < ttl);
    }

    pub fn create(&mut self, now: Instant) -> CartSession {
        self.purge(now);
        let cart = CartSession {
            cart_id: uuid::Uuid::new_v4().simple().to_string(),
            items: Vec::new(),
            created_at: Utc::now(),
        };
        self.sessions.insert(cart.cart_id.clone(), (now, cart.clone()));
        cart
    }

    /// Live cart by id, refreshing its expiry.
    pub fn get_mut(&mut self, id: &str, now: Instant) -> Option<&mut CartSession> {
        self.purge(now);
        let (used, cart) = self.sessions.get_mut(id)?;
        *used = now;
        Some(cart)
    }

    pub fn len(&self) -> usize {
        self.sessions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sessions.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_semantics() {
        let mut carts = Carts::new(Duration::from_secs(60));
        let now = Instant::now();
        let id = carts.create(now).cart_id;
        let cart = carts.get_mut(&id, now).unwrap();
        assert!(cart.add("a"));
        assert!(cart.add("b"));
        assert!(!cart.add("a"));
        assert!(cart.remove("a"));
        assert!(!cart.remove("zz"));
        assert_eq!(cart.items, ["b"]);
    }

    #[test]
    fn sessions_expire_after_idle_ttl() {
        let mut carts = Carts::new(Duration::from_secs(60));
        let t0 = Instant::now();
        let id = carts.create(t0).cart_id;
        assert!(carts.get_mut(&id, t0 + Duration::from_secs(59)).is_some());
        assert!(carts.get_mut(&id, t0 + Duration::from_secs(100)).is_some());
        assert!(carts.get_mut(&id, t0 + Duration::from_secs(161)).is_none());
        assert!(carts.is_empty());
    }
}
