// Bootstrap: pick or create a session, then poll and render.

import { ApiClient } from "./api.js";
import { render } from "./board.js";
import { SessionStore } from "./state.js";

const PHONE_DEMO = `model phone
root Phone
mandatory Phone Screen
optional Phone GPS
alt Screen Basic HD
constraint (not (and Basic GPS))
`;

function params(): URLSearchParams {
  return new URLSearchParams(window.location.search);
}

async function start(): Promise<void> {
  const root = document.getElementById("board");
  if (!root) throw new Error("missing #board element");
  const api = new ApiClient(params().get("api") ?? "");

  let sessionId = params().get("session");
  if (!sessionId) {
    // demo bootstrap: a fresh phone session with two members
    const model = await api.createModel(PHONE_DEMO);
    const snapshot = await api.createSession(model.id, ["u1", "u2"]);
    sessionId = snapshot.id;
    const url = new URL(window.location.href);
    url.searchParams.set("session", sessionId);
    window.history.replaceState(null, "", url.toString());
  }

  const store = new SessionStore(api, sessionId);
  const redraw = () =>
    render(
      root,
      store.state,
      (action) => void store.submit(action),
      (member) => store.setActiveMember(member),
    );
  store.subscribe(redraw);
  await store.refresh();
  store.startPolling();
}

void start();
