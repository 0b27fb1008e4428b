//! The browser client is a static page that learns where to connect from
//! its URL: `?server=ws://host:port&room=pair-1&name=alice`.

use std::net::SocketAddr;

use url::Url;

use crate::ServerError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClientParams {
    /// WebSocket address, `ws://host:port`.
    pub server: String,
    pub room: String,
    /// Left out of shared room links; each student fills in their own.
    pub name: Option<String>,
}

impl ClientParams {
    pub fn for_room(ws_addr: SocketAddr, room: impl Into<String>) -> Self {
        Self {
            server: format!("ws://{ws_addr}"),
            room: room.into(),
            name: None,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// The query string, without the leading `?`.
    pub fn query(&self) -> String {
        let mut q = url::form_urlencoded::Serializer::new(String::new());
        q.append_pair("server", &self.server).append_pair("room", &self.room);
        if let Some(name) = &self.name {
            q.append_pair("name", name);
        }
        q.finish()
    }

    /// `page` with these parameters as its query, replacing any it had.
    pub fn link(&self, page: &str) -> Result<String, ServerError> {
        let mut url = Url::parse(page).map_err(|e| ServerError::Config(format!("client page {page}: {e}")))?;
        url.set_query(Some(&self.query()));
        Ok(url.into())
    }

    /// Reads the parameters from a full URL, a `?query` or a bare query.
    pub fn parse(input: &str) -> Result<Self, ServerError> {
        let query = match Url::parse(input) {
            Ok(url) => url.query().unwrap_or_default().to_string(),
            Err(_) => input.trim_start_matches('?').to_string(),
        };
        let (mut server, mut room, mut name) = (None, None, None);
        for (k, v) in url::form_urlencoded::parse(query.as_bytes()) {
            match k.as_ref() {
                "server" => server = Some(v.into_owned()),
                "room" => room = Some(v.into_owned()),
                "name" => name = Some(v.into_owned()).filter(|n| !n.is_empty()),
                _ => {}
            }
        }
        let missing = |what: &str| ServerError::Config(format!("client link has no {what}"));
        let server = server.ok_or_else(|| missing("server"))?;
        if !server.starts_with("ws://") && !server.starts_with("wss://") {
            return Err(ServerError::Config(format!("client server {server} is not a ws:// address")));
        }
        Ok(Self {
            server,
            room: room.ok_or_else(|| missing("room"))?,
            name,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn query_round_trips_through_encoding() {
        let p = ClientParams::for_room("127.0.0.1:7879".parse().unwrap(), "pair 1&2").with_name("zoë");
        let q = p.query();
        assert_eq!(q, "server=ws%3A%2F%2F127.0.0.1%3A7879&room=pair+1%262&name=zo%C3%AB");
        assert_eq!(ClientParams::parse(&q).unwrap(), p);
        assert_eq!(ClientParams::parse(&format!("?{q}")).unwrap(), p);
    }

    #[test]
    fn link_replaces_the_page_query() {
        let p = ClientParams::for_room("10.0.0.2:9000".parse().unwrap(), "lab");
        let link = p.link("http://teacher.local/dh.html?old=1").unwrap();
        assert_eq!(link, "http://teacher.local/dh.html?server=ws%3A%2F%2F10.0.0.2%3A9000&room=lab");
        assert_eq!(ClientParams::parse(&link).unwrap(), p);
    }

    #[test]
    fn missing_or_wrong_fields_are_errors() {
        assert!(ClientParams::parse("room=lab").is_err());
        assert!(ClientParams::parse("server=ws://h:1").is_err());
        assert!(ClientParams::parse("server=http://h:1&room=lab").is_err());
        let p = ClientParams::parse("server=ws://h:1&room=lab&name=&extra=x").unwrap();
        assert_eq!(p.name, None);
    }
}
