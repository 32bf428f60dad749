// Session client: connects, speaks only protocol-defined messages, caps
// the hand-message rate to one per display frame, and reconnects with a
// fresh session no faster than once per second.

import { decode, encode, type ClientMessage, type ServerMessage } from "./protocol.js";
import {
    applyServerMessage,
    initialState,
    resetForNewSession,
    type ViewState,
} from "./state.js";

export interface WsLike {
    send(data: string): void;
    close(): void;
    onopen: (() => void) | null;
    onmessage: ((ev: { data: unknown }) => void) | null;
    onclose: (() => void) | null;
    onerror: ((err?: unknown) => void) | null;
}

export type WsFactory = (url: string) => WsLike;

export interface ClientOptions {
    now?: () => number;
    schedule?: (fn: () => void, ms: number) => void;
    reconnectDelayMs?: number;
    /** Extra config sent in hello. A pointer-driven virtual hand carries
     *  no sensor noise, so the playground disables input filtering to get
     *  exact corner-to-corner mapping. */
    helloConfig?: Record<string, Record<string, unknown>>;
}

export const CLEAN_PIPELINE = {
    pipeline: { smoothing_alpha: 1.0, dead_zone_m: 0.0 },
};

export class PlaygroundClient {
    readonly state: ViewState;
    private ws: WsLike | null = null;
    private pendingHand: { x: number; y: number; push: boolean } | null = null;
    private closed = false;
    private reconnectQueued = false;
    private readonly now: () => number;
    private readonly schedule: (fn: () => void, ms: number) => void;
    private readonly reconnectDelayMs: number;
    private readonly helloConfig: Record<string, Record<string, unknown>>;
    private listeners: ((msg: ServerMessage) => void)[] = [];

    constructor(
        private readonly url: string,
        private readonly factory: WsFactory,
        options: ClientOptions = {},
    ) {
        this.state = initialState();
        this.now = options.now ?? (() => Date.now());
        this.schedule = options.schedule ?? ((fn, ms) => setTimeout(fn, ms));
        this.reconnectDelayMs = Math.max(1000, options.reconnectDelayMs ?? 1000);
        this.helloConfig = options.helloConfig ?? CLEAN_PIPELINE;
    }

    onMessage(listener: (msg: ServerMessage) => void): void {
        this.listeners.push(listener);
    }

    connect(): void {
        if (this.closed) return;
        Object.assign(this.state, resetForNewSession(this.state));
        const ws = this.factory(this.url);
        this.ws = ws;
        ws.onopen = () => {
            this.send({ type: "hello", config: this.helloConfig });
        };
        ws.onmessage = (ev) => {
            const text = typeof ev.data === "string" ? ev.data : String(ev.data);
            const msg = decode(text);
            if (msg === null) return;
            applyServerMessage(this.state, msg, this.now());
            for (const fn of this.listeners) fn(msg);
        };
        ws.onclose = () => this.handleDrop();
        ws.onerror = () => {
            /* onclose follows; nothing else to do */
        };
    }

    private handleDrop(): void {
        this.ws = null;
        this.state.status = "disconnected";
        if (this.closed || this.reconnectQueued) return;
        this.reconnectQueued = true;
        this.schedule(() => {
            this.reconnectQueued = false;
            this.connect();
        }, this.reconnectDelayMs);
    }

    private send(msg: ClientMessage): boolean {
        if (this.ws === null || this.state.status === "disconnected") return false;
        try {
            this.ws.send(encode(msg));
        } catch {
            return false;
        }
        return true;
    }

    /** Record the latest hand sample; superseded samples are dropped. */
    moveHand(x: number, y: number, push: boolean): void {
        this.pendingHand = {
            x: Math.min(1, Math.max(0, x)),
            y: Math.min(1, Math.max(0, y)),
            push,
        };
    }

    /** Send at most one hand message; call once per display frame. */
    flushHand(): boolean {
        if (this.pendingHand === null || this.state.status !== "ready") return false;
        const { x, y, push } = this.pendingHand;
        this.pendingHand = null;
        return this.send({ type: "hand", x, y, push });
    }

    startGame(game: "fruit" | "shape", seed: number): void {
        this.send({ type: "game_start", game, seed });
    }

    stopGame(): void {
        this.send({ type: "game_stop" });
    }

    close(): void {
        this.closed = true;
        this.ws?.close();
        this.ws = null;
    }
}
