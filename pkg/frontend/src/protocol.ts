// Wire protocol for the gesture service, endpoint /v1/session.
// One JSON object per text message; these are the only message shapes
// the playground ever sends or accepts.

export interface HelloMessage {
    type: "hello";
    config?: Record<string, Record<string, unknown>>;
}

export interface HandMessage {
    type: "hand";
    x: number; // [0, 1] panel coordinates, 0 = left
    y: number; // [0, 1], 0 = top
    push: boolean;
}

export interface GameStartMessage {
    type: "game_start";
    game: "fruit" | "shape";
    seed: number;
}

export interface GameStopMessage {
    type: "game_stop";
}

export type ClientMessage = HelloMessage | HandMessage | GameStartMessage | GameStopMessage;

export interface ReadyMessage {
    type: "ready";
    session: string;
    config: Record<string, Record<string, unknown>>;
}

export interface PointerMessage {
    type: "pointer";
    u: number; // [0, 65535]
    v: number;
    t: number;
}

export interface GestureMessage {
    type: "gesture";
    t: number;
    kind: "click" | "cut_start" | "cut_end" | "drag_start" | "drag_end" | "rotation" | "balance";
    payload: Record<string, unknown>;
}

export interface SpawnMessage {
    type: "spawn";
    id: number;
    kind: "fruit" | "circle" | "rect";
    pos: [number, number];
    t: number;
    vel?: [number, number];
    r?: number;
    ext?: [number, number];
    expire_t?: number;
}

export interface DespawnMessage {
    type: "despawn";
    id: number;
    t: number;
}

export interface HitMessage {
    type: "hit";
    id: number;
    score: number;
    t: number;
}

export interface StatsMessage {
    type: "stats";
    score: number;
    hits: number;
    misses: number;
    hit_rate: number;
    duration_ms: number;
}

export interface ErrorMessage {
    type: "error";
    code: string;
    detail: string;
}

export type ServerMessage =
    | ReadyMessage
    | PointerMessage
    | GestureMessage
    | SpawnMessage
    | DespawnMessage
    | HitMessage
    | StatsMessage
    | ErrorMessage;

export function encode(msg: ClientMessage): string {
    return JSON.stringify(msg);
}

export function decode(data: string): ServerMessage | null {
    let parsed: unknown;
    try {
        parsed = JSON.parse(data);
    } catch {
        return null;
    }
    if (typeof parsed !== "object" || parsed === null) return null;
    const type = (parsed as { type?: unknown }).type;
    if (typeof type !== "string") return null;
    switch (type) {
        case "ready":
        case "pointer":
        case "gesture":
        case "spawn":
        case "despawn":
        case "hit":
        case "stats":
        case "error":
            return parsed as ServerMessage;
        default:
            return null;
    }
}
