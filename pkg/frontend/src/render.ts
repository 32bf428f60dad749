// Canvas renderer: a pure function of (state, now). No socket traffic,
// no state mutation; everything drawn comes from the reducer's output.

import {
    activeBadges,
    cursorToCanvas,
    entityPosition,
    gravityOf,
    type ViewState,
} from "./state.js";

// Subset of CanvasRenderingContext2D the renderer touches; tests supply a
// recording fake.
export interface Ctx {
    fillStyle: string | CanvasGradient | CanvasPattern;
    strokeStyle: string | CanvasGradient | CanvasPattern;
    lineWidth: number;
    font: string;
    fillRect(x: number, y: number, w: number, h: number): void;
    strokeRect(x: number, y: number, w: number, h: number): void;
    beginPath(): void;
    arc(x: number, y: number, r: number, a0: number, a1: number): void;
    moveTo(x: number, y: number): void;
    lineTo(x: number, y: number): void;
    fill(): void;
    stroke(): void;
    fillText(text: string, x: number, y: number): void;
}

export const SCREEN_W = 640;
export const SCREEN_H = 480;

const ENTITY_COLORS: Record<string, string> = {
    fruit: "#e4572e",
    circle: "#4cb944",
    rect: "#4062bb",
};

export function render(ctx: Ctx, state: ViewState, now: number): void {
    ctx.fillStyle = "#101418";
    ctx.fillRect(0, 0, SCREEN_W, SCREEN_H);

    const gravity = gravityOf(state);
    for (const entity of state.entities.values()) {
        const [x, y] = entityPosition(entity, now, gravity);
        ctx.fillStyle = ENTITY_COLORS[entity.kind] ?? "#888888";
        if (entity.kind === "rect") {
            ctx.fillRect(x, y, entity.ext[0], entity.ext[1]);
        } else {
            ctx.beginPath();
            ctx.arc(x, y, entity.r, 0, Math.PI * 2);
            ctx.fill();
        }
    }

    if (state.lastCut !== null && state.lastCut.until > now) {
        const [[ax, ay], [bx, by]] = state.lastCut.seg;
        ctx.strokeStyle = "#f5f749";
        ctx.lineWidth = 2;
        ctx.beginPath();
        ctx.moveTo(ax, ay);
        ctx.lineTo(bx, by);
        ctx.stroke();
    }

    if (state.cursor !== null) {
        const { x, y } = cursorToCanvas(state.cursor.u, state.cursor.v, SCREEN_W, SCREEN_H);
        ctx.strokeStyle = "#ffffff";
        ctx.lineWidth = 1;
        ctx.beginPath();
        ctx.moveTo(x - 8, y);
        ctx.lineTo(x + 8, y);
        ctx.moveTo(x, y - 8);
        ctx.lineTo(x, y + 8);
        ctx.stroke();
    }

    ctx.fillStyle = "#e8e8e8";
    ctx.font = "14px monospace";
    ctx.fillText(
        `score ${state.score}  hits ${state.hits}  misses ${state.misses}`,
        10,
        20,
    );
    ctx.fillText(`status ${state.status}${state.session ? " " + state.session : ""}`, 10, 38);
    const badges = activeBadges(state, now).map((b) => b.kind);
    if (badges.length > 0) {
        ctx.fillStyle = "#f5f749";
        ctx.fillText(badges.join("  "), 10, 56);
    }
    if (state.status === "disconnected") {
        ctx.fillStyle = "#e4572e";
        ctx.fillRect(0, SCREEN_H - 28, SCREEN_W, 28);
        ctx.fillStyle = "#ffffff";
        ctx.fillText("disconnected - retrying", 10, SCREEN_H - 9);
    }
    if (state.lastError !== null) {
        ctx.fillStyle = "#e4572e";
        ctx.fillText(`error ${state.lastError.code}`, 10, 74);
    }
}
