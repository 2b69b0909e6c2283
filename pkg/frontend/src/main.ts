/** Browser bootstrap: wire the form to a LabelSession. */

import { Api } from "./api.js";
import { LabelSession } from "./session.js";
import { PanelSlots, render } from "./ui.js";

function slot(id: string): HTMLElement {
  const element = document.getElementById(id);
  if (!element) {
    throw new Error(`missing element #${id}`);
  }
  return element;
}

function currentUser(): string {
  const params = new URLSearchParams(window.location.search);
  const fromQuery = params.get("user");
  if (fromQuery) {
    return fromQuery;
  }
  const stored = window.localStorage.getItem("feedfilter-user");
  if (stored) {
    return stored;
  }
  const generated = `web-${Math.random().toString(36).slice(2, 10)}`;
  window.localStorage.setItem("feedfilter-user", generated);
  return generated;
}

async function boot(): Promise<void> {
  const slots: PanelSlots = {
    messageText: slot("message-text"),
    progress: slot("progress"),
    prediction: slot("prediction"),
    agreement: slot("agreement"),
    warmup: slot("warmup"),
    categories: slot("categories"),
    validation: slot("validation"),
    banner: slot("banner"),
    retry: slot("retry"),
    form: slot("rating-form"),
    done: slot("done"),
  };
  const user = currentUser();
  slot("user-label").textContent = `session: ${user}`;

  const session = new LabelSession(new Api(""), user);
  session.onChange((state) => render(state, slots));

  const form = slot("rating-form") as HTMLFormElement;
  const submitChoice = async (filter: boolean) => {
    const picked = form.querySelector<HTMLInputElement>("input[name=intensity]:checked");
    const intensity = picked ? Number(picked.value) : NaN;
    await session.submit({ intensity, filter });
    if (picked && session.view().phase === "rating") {
      picked.checked = false;
    }
  };
  slot("choice-filter").addEventListener("click", (event) => {
    event.preventDefault();
    void submitChoice(true);
  });
  slot("choice-keep").addEventListener("click", (event) => {
    event.preventDefault();
    void submitChoice(false);
  });
  slot("retry").addEventListener("click", (event) => {
    event.preventDefault();
    void session.retry();
  });

  await session.start();
}

void boot();
