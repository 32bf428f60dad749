// View state and the reducer that applies server messages to it.
// Rendered entities are exactly those spawned and not yet despawned/hit;
// score and hit/miss counters mirror the latest hit/despawn/stats
// messages, nothing is recomputed client-side.

import type { ServerMessage } from "./protocol.js";

export const BADGE_TTL_MS = 900;

export interface Entity {
    id: number;
    kind: "fruit" | "circle" | "rect";
    pos: [number, number];
    vel: [number, number];
    r: number;
    ext: [number, number];
    spawnT: number;      // server stream time, ms
    receivedAt: number;  // local clock, for client-side animation
}

export interface Badge {
    kind: string;
    until: number; // local clock deadline
}

export interface CutSegment {
    seg: [[number, number], [number, number]];
    until: number;
}

export interface ViewState {
    status: "connecting" | "ready" | "disconnected";
    session: string | null;
    config: Record<string, Record<string, unknown>> | null;
    cursor: { u: number; v: number; t: number } | null;
    badges: Badge[];
    lastCut: CutSegment | null;
    entities: Map<number, Entity>;
    score: number;
    hits: number;
    misses: number;
    finalStats: { score: number; hits: number; misses: number; hit_rate: number } | null;
    lastError: { code: string; detail: string } | null;
}

export function initialState(): ViewState {
    return {
        status: "connecting",
        session: null,
        config: null,
        cursor: null,
        badges: [],
        lastCut: null,
        entities: new Map(),
        score: 0,
        hits: 0,
        misses: 0,
        finalStats: null,
        lastError: null,
    };
}

/** Screen-pixel position of a wire pointer coordinate pair. */
export function cursorToCanvas(
    u: number,
    v: number,
    width: number,
    height: number,
): { x: number; y: number } {
    return {
        x: Math.min(Math.floor((u * width) / 65536), width - 1),
        y: Math.min(Math.floor((v * height) / 65536), height - 1),
    };
}

/** Ballistic extrapolation for fruits between server updates. */
export function entityPosition(e: Entity, now: number, gravity: number): [number, number] {
    if (e.kind !== "fruit") return e.pos;
    const dt = Math.max(0, now - e.receivedAt) / 1000;
    return [
        e.pos[0] + e.vel[0] * dt,
        e.pos[1] + e.vel[1] * dt + 0.5 * gravity * dt * dt,
    ];
}

export function gravityOf(state: ViewState): number {
    const game = state.config?.game as { gravity_px_s2?: number } | undefined;
    return game?.gravity_px_s2 ?? 600;
}

export function applyServerMessage(state: ViewState, msg: ServerMessage, now: number): ViewState {
    switch (msg.type) {
        case "ready":
            state.status = "ready";
            state.session = msg.session;
            state.config = msg.config;
            break;
        case "pointer":
            state.cursor = { u: msg.u, v: msg.v, t: msg.t };
            break;
        case "gesture":
            state.badges = state.badges.filter((b) => b.until > now);
            state.badges.push({ kind: msg.kind, until: now + BADGE_TTL_MS });
            if (msg.kind === "cut_end") {
                const seg = msg.payload.seg as [[number, number], [number, number]];
                state.lastCut = { seg, until: now + BADGE_TTL_MS };
            }
            break;
        case "spawn":
            state.entities.set(msg.id, {
                id: msg.id,
                kind: msg.kind,
                pos: msg.pos,
                vel: msg.vel ?? [0, 0],
                r: msg.r ?? 0,
                ext: msg.ext ?? [0, 0],
                spawnT: msg.t,
                receivedAt: now,
            });
            break;
        case "despawn":
            if (state.entities.delete(msg.id)) {
                state.misses += 1;
            }
            break;
        case "hit":
            if (state.entities.delete(msg.id)) {
                state.hits += 1;
            }
            state.score = msg.score;
            break;
        case "stats":
            state.score = msg.score;
            state.hits = msg.hits;
            state.misses = msg.misses;
            state.finalStats = {
                score: msg.score,
                hits: msg.hits,
                misses: msg.misses,
                hit_rate: msg.hit_rate,
            };
            state.entities.clear();
            break;
        case "error":
            state.lastError = { code: msg.code, detail: msg.detail };
            break;
    }
    return state;
}

export function activeBadges(state: ViewState, now: number): Badge[] {
    return state.badges.filter((b) => b.until > now);
}

export function resetForNewSession(state: ViewState): ViewState {
    const fresh = initialState();
    fresh.status = "connecting";
    return fresh;
}
