//! A minimal line-protocol client, and a driver that lets an [`Autopilot`]
//! play one side of an exchange through a real connection.

use std::time::Duration;

use cryptopath_core::channel::{Autopilot, MessageType, Payload, SessionError, WireMessage};
use thiserror::Error;
use tokio::io::{AsyncBufReadExt, AsyncWriteExt, BufReader, Lines};
use tokio::net::tcp::{OwnedReadHalf, OwnedWriteHalf};
use tokio::net::{TcpStream, ToSocketAddrs};

use crate::codec::{decode, encode};

#[derive(Debug, Error)]
pub enum ClientError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("server closed the connection")]
    Closed,
    #[error("{0}")]
    Decode(String),
    #[error("server refused: {0}")]
    Refused(String),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error("no message within {0:?}")]
    Timeout(Duration),
}

pub struct LineClient {
    lines: Lines<BufReader<OwnedReadHalf>>,
    writer: OwnedWriteHalf,
}

impl LineClient {
    pub async fn connect(addr: impl ToSocketAddrs) -> Result<Self, ClientError> {
        let (read, writer) = TcpStream::connect(addr).await?.into_split();
        Ok(Self {
            lines: BufReader::new(read).lines(),
            writer,
        })
    }

    pub async fn send(&mut self, message: &WireMessage) -> Result<(), ClientError> {
        self.send_raw(&encode(message)).await
    }

    pub async fn send_raw(&mut self, line: &str) -> Result<(), ClientError> {
        self.writer.write_all(format!("{line}\n").as_bytes()).await?;
        Ok(())
    }

    pub async fn recv(&mut self) -> Result<WireMessage, ClientError> {
        let line = self.lines.next_line().await?.ok_or(ClientError::Closed)?;
        decode(&line).map_err(ClientError::Decode)
    }

    pub async fn recv_within(&mut self, limit: Duration) -> Result<WireMessage, ClientError> {
        tokio::time::timeout(limit, self.recv())
            .await
            .map_err(|_| ClientError::Timeout(limit))?
    }

    /// Joins `room` as `name` and waits for the room's echo of the join.
    pub async fn join(&mut self, room: &str, name: &str) -> Result<WireMessage, ClientError> {
        self.send(&WireMessage::new(room, name, Payload::Join(Default::default())))
            .await?;
        self.await_own(name, MessageType::Join).await
    }

    /// Sends `leave` and waits for its echo.
    pub async fn leave(&mut self, room: &str, name: &str) -> Result<WireMessage, ClientError> {
        self.send(&WireMessage::new(room, name, Payload::Leave)).await?;
        self.await_own(name, MessageType::Leave).await
    }

    async fn await_own(&mut self, name: &str, kind: MessageType) -> Result<WireMessage, ClientError> {
        loop {
            let msg = self.recv().await?;
            if let Payload::Error(e) = &msg.payload {
                return Err(ClientError::Refused(e.reason.clone()));
            }
            if msg.sender == name && msg.kind() == kind {
                return Ok(msg);
            }
        }
    }
}

/// Feeds everything the room delivers to `pilot` and sends its replies,
/// until it has finished and heard its peer finish. Returns the pilot and
/// every room message it was delivered, in order.
pub async fn drive(
    client: &mut LineClient,
    mut pilot: Autopilot,
    first: Vec<WireMessage>,
) -> Result<(Autopilot, Vec<WireMessage>), ClientError> {
    let mut seen = Vec::new();
    let mut pending = first;
    loop {
        for msg in pending.drain(..) {
            if let Payload::Error(e) = &msg.payload {
                return Err(ClientError::Refused(e.reason.clone()));
            }
            if matches!(msg.kind(), MessageType::Scenario | MessageType::Pong) {
                continue;
            }
            for reply in pilot.on_message(&msg)? {
                client.send(&reply).await?;
            }
            seen.push(msg);
        }
        if pilot.is_finished() && pilot.state().peer_done() {
            return Ok((pilot, seen));
        }
        pending.push(client.recv().await?);
    }
}

/// Joins and plays a whole exchange.
pub async fn run_scripted_peer(
    client: &mut LineClient,
    pilot: Autopilot,
) -> Result<(Autopilot, Vec<WireMessage>), ClientError> {
    let (room, name) = (pilot.state().room().to_string(), pilot.state().name().to_string());
    let echo = client.join(&room, &name).await?;
    drive(client, pilot, vec![echo]).await
}
