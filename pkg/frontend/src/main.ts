// Browser bootstrap: wires pointer input, the render loop, and the game
// buttons to a PlaygroundClient. Server url comes from the ?ws= query
// parameter and defaults to the serving host.

import { PlaygroundClient, type WsLike } from "./client.js";
import { render, SCREEN_H, SCREEN_W } from "./render.js";

function serverUrl(): string {
    const param = new URLSearchParams(window.location.search).get("ws");
    if (param !== null) return param;
    return `ws://${window.location.host}/v1/session`;
}

function main(): void {
    const canvas = document.getElementById("screen") as HTMLCanvasElement;
    canvas.width = SCREEN_W;
    canvas.height = SCREEN_H;
    const ctx = canvas.getContext("2d");
    if (ctx === null) throw new Error("2d canvas unsupported");

    const client = new PlaygroundClient(serverUrl(), (url) => new WebSocket(url) as WsLike);
    client.connect();

    let pressed = false;
    const track = (ev: PointerEvent) => {
        const rect = canvas.getBoundingClientRect();
        const x = (ev.clientX - rect.left) / rect.width;
        const y = (ev.clientY - rect.top) / rect.height;
        client.moveHand(x, y, pressed);
    };
    canvas.addEventListener("pointermove", track);
    canvas.addEventListener("pointerdown", (ev) => {
        pressed = true;
        canvas.setPointerCapture(ev.pointerId);
        track(ev);
    });
    canvas.addEventListener("pointerup", (ev) => {
        pressed = false;
        track(ev);
    });

    (document.getElementById("start-fruit") as HTMLButtonElement).onclick = () =>
        client.startGame("fruit", Math.floor(Math.random() * 1_000_000));
    (document.getElementById("start-shape") as HTMLButtonElement).onclick = () =>
        client.startGame("shape", Math.floor(Math.random() * 1_000_000));
    (document.getElementById("stop-game") as HTMLButtonElement).onclick = () =>
        client.stopGame();

    const frame = () => {
        client.flushHand(); // rate cap: at most one hand message per frame
        render(ctx, client.state, Date.now());
        requestAnimationFrame(frame);
    };
    requestAnimationFrame(frame);
}

main();
