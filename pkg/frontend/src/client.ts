// Gateway client: owns the session lifecycle and folds socket frames into
// the view model. On connection loss it tears down, surfaces a banner, and
// retries with a brand new session; server sessions are cheap and the old
// one's history is gone with its socket, so resuming buys nothing.

import { parseFrame, type ClientCommand, type ServerFrame } from "./protocol.js";
import {
  applyFrame,
  initialView,
  setConnection,
  type UiSessionView,
} from "./viewModel.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((event: { data: unknown }) => void) | null;
  onclose: (() => void) | null;
}

export interface GatewayClientOptions {
  /** Absolute http(s) origin of the gateway, no trailing slash. */
  baseUrl: string;
  onView: (view: UiSessionView) => void;
  /** Connection-loss banner text, or null to clear it. */
  onBanner: (message: string | null) => void;
  /** Raw frame tap, e.g. to start audio playback on speech_started. */
  onFrame?: (frame: ServerFrame) => void;
  fetchFn?: typeof fetch;
  socketFactory?: (url: string) => SocketLike;
  reconnectDelayMs?: number;
}

function browserSocket(url: string): SocketLike {
  const ctor = (globalThis as unknown as { WebSocket: new (u: string) => SocketLike })
    .WebSocket;
  return new ctor(url);
}

export class GatewayClient {
  private view: UiSessionView = initialView();
  private socket: SocketLike | null = null;
  private stopped = false;
  private generation = 0;
  sessionId: string | null = null;

  constructor(private readonly options: GatewayClientOptions) {}

  get currentView(): UiSessionView {
    return this.view;
  }

  start(): void {
    this.stopped = false;
    void this.connect();
  }

  stop(): void {
    this.stopped = true;
    this.generation += 1;
    this.socket?.close();
    this.socket = null;
  }

  /** Send a command on the open socket; false if not connected. */
  send(command: ClientCommand): boolean {
    if (!this.socket || this.view.connection !== "open") return false;
    this.socket.send(JSON.stringify(command));
    return true;
  }

  private update(view: UiSessionView): void {
    this.view = view;
    this.options.onView(view);
  }

  private async connect(): Promise<void> {
    const gen = ++this.generation;
    this.update(setConnection(initialView(), "connecting"));
    const fetchFn = this.options.fetchFn ?? fetch;
    let sessionId: string;
    try {
      const response = await fetchFn(`${this.options.baseUrl}/sessions`, {
        method: "POST",
      });
      if (!response.ok) throw new Error(`session create failed: ${response.status}`);
      const body = (await response.json()) as { session_id?: unknown };
      if (typeof body.session_id !== "string") throw new Error("bad session payload");
      sessionId = body.session_id;
    } catch {
      this.scheduleReconnect(gen);
      return;
    }
    if (this.stopped || gen !== this.generation) return;

    this.sessionId = sessionId;
    const wsBase = this.options.baseUrl.replace(/^http/, "ws");
    const factory = this.options.socketFactory ?? browserSocket;
    const socket = factory(`${wsBase}/sessions/${sessionId}/stream`);
    this.socket = socket;

    socket.onopen = () => {
      if (gen !== this.generation) return;
      this.options.onBanner(null);
      this.update(setConnection(this.view, "open"));
    };
    socket.onmessage = (event) => {
      if (gen !== this.generation) return;
      if (typeof event.data !== "string") return;
      const frame = parseFrame(event.data);
      if (frame === null) return;
      this.options.onFrame?.(frame);
      this.update(applyFrame(this.view, frame));
    };
    socket.onclose = () => {
      if (gen !== this.generation) return;
      this.socket = null;
      this.update(setConnection(this.view, "closed"));
      this.scheduleReconnect(gen);
    };
  }

  private scheduleReconnect(gen: number): void {
    if (this.stopped || gen !== this.generation) return;
    this.options.onBanner("Connection lost. Starting a fresh session...");
    setTimeout(() => {
      if (this.stopped || gen !== this.generation) return;
      void this.connect();
    }, this.options.reconnectDelayMs ?? 1500);
  }
}
